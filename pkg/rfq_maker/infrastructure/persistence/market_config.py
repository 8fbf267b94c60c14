"""
Market configuration files (JSON or TOML).

Schema:
    {"bonds": [{"id", "lambda" | ("lambda_bid", "lambda_ask"), "size_numeraire",
                "alpha", "beta", "mu", "sigma", "max_units"?}],
     "covariance": [[...]],
     "penalty": {"kind": "stddev" | "variance", "gamma"},
     "discount": r}
"""

import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Optional, Sequence, Union

from ...domain.intensity.models import SuJohnsonCurve
from ...domain.market.models import BondSpec, MarketSpec, PenaltyKind, PenaltySpec
from ...shared.exceptions import ConfigurationError, RfqMakerException

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

BUNDLED_MARKET = Path(__file__).resolve().parent.parent / "data" / "bonds20.json"


def _bond_from_dict(entry: dict) -> BondSpec:
    try:
        if "lambda" in entry:
            lam_bid = lam_ask = float(entry["lambda"])
        else:
            lam_bid, lam_ask = float(entry["lambda_bid"]), float(entry["lambda_ask"])
        curve = SuJohnsonCurve(
            float(entry["alpha"]), float(entry["beta"]), float(entry["mu"]), float(entry["sigma"])
        )
        return BondSpec(
            id=str(entry["id"]),
            lambda_bid=lam_bid,
            lambda_ask=lam_ask,
            rfq_size_numeraire=float(entry["size_numeraire"]),
            curve=curve,
            max_units=int(entry.get("max_units", 5)),
        )
    except KeyError as e:
        raise ConfigurationError(f"bond entry is missing field {e}", {"entry": entry})


def market_from_dict(data: dict) -> MarketSpec:
    """
    Build a MarketSpec from the configuration schema.

    Raises:
        ConfigurationError: On missing fields or invalid values
    """
    try:
        bonds = tuple(_bond_from_dict(entry) for entry in data["bonds"])
        penalty = PenaltySpec(PenaltyKind(data["penalty"]["kind"]), float(data["penalty"]["gamma"]))
        return MarketSpec(bonds, data["covariance"], penalty, float(data["discount"]))
    except KeyError as e:
        raise ConfigurationError(f"market configuration is missing field {e}")
    except ValueError as e:
        raise ConfigurationError(f"invalid market configuration: {e}")
    except ConfigurationError:
        raise
    except RfqMakerException as e:
        raise ConfigurationError(e.message, e.details)


def market_to_dict(market: MarketSpec) -> dict:
    """Inverse of `market_from_dict` (maximal limits are kept, active ones are not)."""
    bonds = []
    for b in market.bonds:
        entry = {"id": b.id}
        if b.lambda_bid == b.lambda_ask:
            entry["lambda"] = b.lambda_bid
        else:
            entry["lambda_bid"] = b.lambda_bid
            entry["lambda_ask"] = b.lambda_ask
        entry.update({
            "size_numeraire": b.rfq_size_numeraire,
            "alpha": b.curve.alpha,
            "beta": b.curve.beta,
            "mu": b.curve.mu,
            "sigma": b.curve.sigma_curve,
            "max_units": b.max_units,
        })
        bonds.append(entry)
    return {
        "penalty": {"kind": market.penalty.kind.value, "gamma": market.penalty.gamma},
        "discount": market.discount,
        "bonds": bonds,
        "covariance": market.covariance.tolist(),
    }


def load_market(
    path: Optional[PathLike] = None,
    bonds: Optional[Sequence[str]] = None,
    penalty: Optional[str] = None,
    gamma: Optional[float] = None,
    discount: Optional[float] = None,
) -> MarketSpec:
    """
    Read a market file, optionally restricted to some bonds and with the
    penalty kind, γ or r overridden.

    Args:
        path: .json or .toml file; the bundled 20-bond market when None

    Raises:
        ConfigurationError: If the file cannot be read or is invalid
    """
    path = Path(path) if path is not None else BUNDLED_MARKET
    try:
        if path.suffix == ".toml":
            with open(path, "rb") as f:
                data = tomllib.load(f)
        else:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
    except FileNotFoundError:
        raise ConfigurationError(f"market file not found: {path}", {"path": str(path)})
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigurationError(f"cannot parse market file {path}: {e}", {"path": str(path)})

    market = market_from_dict(data)
    try:
        if bonds:
            market = market.subset(list(bonds))
        if penalty is not None or gamma is not None or discount is not None:
            market = market.with_penalty(PenaltyKind(penalty) if penalty else None, gamma, discount)
    except ValueError as e:
        raise ConfigurationError(f"invalid override: {e}")
    except RfqMakerException as e:
        raise ConfigurationError(e.message, e.details)
    logger.info(f"Loaded market with {market.dimension} bonds from {path.name}")
    return market


def save_market(market: MarketSpec, path: PathLike) -> Path:
    """Write the market as JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(market_to_dict(market), f, indent=2)
    return path
