"""
Command-line entry point (`rfq-maker`).

Every subcommand prints its JSON summary on stdout. Failures print
{"error", "message", "details"} on stderr and exit with code 1.
"""

import argparse
import json
import logging
import sys
from typing import Callable, Dict, List, Optional

from ..domain.actor_critic import preset_names
from ..shared.exceptions import RfqMakerException
from ..shared.logging_setup import configure_logging
from .controllers import ExperimentController
from .controllers.experiment_spec import PLOT_KINDS, ExactSolver, ExperimentSpec, Mode, PolicySource

logger = logging.getLogger(__name__)


def _bond_list(text: str) -> List[str]:
    return [b.strip() for b in text.split(",") if b.strip()]


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="market file (.json or .toml); the bundled 20-bond market by default")
    common.add_argument("--bonds", type=_bond_list, default=[], help="comma-separated bond ids")
    common.add_argument("--preset", choices=preset_names(), help="named experiment parameterisation")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--penalty", choices=["stddev", "variance"], help="override the penalty kind")
    common.add_argument("--gamma", type=float, help="override the risk aversion")
    common.add_argument("--discount", type=float, help="override the discount rate r")
    common.add_argument("--log-level", default="INFO", help="logging level")
    return common


def _solver_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--solver", choices=[s.value for s in ExactSolver], default=ExactSolver.VALUE_ITERATION.value,
        help="exact solver: value iteration or finite differences",
    )


def _policy_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--policy", choices=[p.value for p in PolicySource], default=PolicySource.OPTIMAL.value)
    parser.add_argument("--checkpoints", help="checkpoint directory (default <out>/checkpoints)")


def _fd_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tau", type=float, help="FD time step")
    parser.add_argument("--horizon", type=float, help="FD horizon T")
    parser.add_argument("--stopping", choices=["span", "sup"], help="FD stationarity rule")


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="rfq-maker", description="Optimal quoting for a multi-bond RFQ market maker")
    sub = parser.add_subparsers(dest="command", required=True)

    fd = sub.add_parser(Mode.SOLVE_FD.value, parents=[common], help="finite-difference HJB solve")
    _fd_args(fd)
    sub.add_parser(Mode.SOLVE_VI.value, parents=[common], help="value iteration on the inventory grid")

    evaluate = sub.add_parser(Mode.EVALUATE.value, parents=[common], help="average reward per RFQ of a policy")
    _policy_args(evaluate)
    _solver_arg(evaluate)
    evaluate.add_argument("--events", type=int, default=1_000_000, help="Monte-Carlo rollout length")

    train = sub.add_parser(Mode.TRAIN.value, parents=[common], help="actor-critic training")
    train.add_argument("--steps", type=int, help="override the number of training steps")
    train.add_argument("--resume", action="store_true", help="continue from the latest checkpoint")
    train.add_argument("--checkpoints", help="checkpoint directory (default <out>/checkpoints)")

    compare = sub.add_parser(Mode.COMPARE.value, parents=[common], help="exact vs learned quotes (d <= 2)")
    _solver_arg(compare)
    _fd_args(compare)
    compare.add_argument("--events", type=int, default=1_000_000, help="Monte-Carlo rollout length")
    compare.add_argument("--steps", type=int, help="training steps when no checkpoint exists")
    compare.add_argument("--checkpoints", help="checkpoint directory (default <out>/checkpoints)")

    table = sub.add_parser(Mode.TABLE4.value, parents=[common], help="per-bond exact average reward per RFQ")
    _solver_arg(table)
    _fd_args(table)

    plot = sub.add_parser(Mode.PLOTDATA.value, parents=[common], help="plot-ready CSV data")
    plot.add_argument("kind", help=f"one of {', '.join(PLOT_KINDS)}")
    _policy_args(plot)
    _solver_arg(plot)
    _fd_args(plot)
    return parser


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    return ExperimentSpec(
        mode=Mode(args.command),
        out_dir=args.out,
        config_path=args.config,
        bonds=tuple(args.bonds),
        preset=args.preset,
        seed=args.seed,
        penalty=args.penalty,
        gamma=args.gamma,
        discount=args.discount,
        solver=ExactSolver(getattr(args, "solver", ExactSolver.VALUE_ITERATION.value)),
        policy=PolicySource(getattr(args, "policy", PolicySource.OPTIMAL.value)),
        checkpoint_dir=getattr(args, "checkpoints", None),
        events=getattr(args, "events", 1_000_000),
        steps=getattr(args, "steps", None),
        resume=getattr(args, "resume", False),
        plot_kind=getattr(args, "kind", None),
        fd_tau=getattr(args, "tau", None),
        fd_horizon=getattr(args, "horizon", None),
        fd_stopping=getattr(args, "stopping", None),
    )


def _dispatch(controller: ExperimentController) -> Dict[Mode, Callable[[], dict]]:
    return {
        Mode.SOLVE_FD: controller.solve_fd,
        Mode.SOLVE_VI: controller.solve_vi,
        Mode.EVALUATE: controller.evaluate,
        Mode.TRAIN: controller.train,
        Mode.COMPARE: controller.run_compare,
        Mode.TABLE4: controller.run_table4,
        Mode.PLOTDATA: controller.emit_plotdata,
    }


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        spec = spec_from_args(args)
        controller = ExperimentController(spec)
        summary = _dispatch(controller)[spec.mode]()
    except RfqMakerException as e:
        print(json.dumps(e.to_dict(), default=str), file=sys.stderr)
        return 1
    print(json.dumps(summary, indent=2, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
