"""
Experiment Controller
"""

import json
import logging
import math
from dataclasses import replace
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from ...domain.actor_critic import (
    ActorBundle,
    ActorCriticTrainer,
    Critic,
    InitialStrategy,
    LearningCurve,
    TrainConfig,
    get_preset,
)
from ...domain.fd_hjb import FdConfig, FdResult, StoppingRule, solve_stationary
from ...domain.market import InventoryState, MarketSpec, PenaltyKind
from ...domain.simulation import (
    QuoteSource,
    TableQuoteSource,
    estimate_r_mean,
    rollout,
    rollout_standard_error,
)
from ...domain.tabular import (
    PolicyTable,
    ValueFlavor,
    ValueTable,
    average_reward_per_rfq,
    greedy_policy,
    myopic_policy,
    policy_evaluation,
    reward_per_rfq_std,
    to_rfq_value,
    value_iteration,
)
from ...infrastructure.persistence import (
    TorchCheckpointRepository,
    load_market,
    policy_frame,
    save_network,
    state_columns,
    value_difference_frame,
    value_frame,
    write_csv,
)
from ...shared.exceptions import (
    ConfigurationError,
    ExperimentError,
    InvalidParameterError,
    RfqMakerException,
)
from ...shared.random_streams import RandomStreams
from .experiment_spec import PLOT_KINDS, ExactSolver, ExperimentSpec, PolicySource

logger = logging.getLogger(__name__)

EXACT_EVALUATION_MAX_BONDS = 4
COMPARE_MAX_BONDS = 2
TABLE_MC_EVENTS = 3000  # RFQs behind each reference per-bond reward
SE_BATCHES = 20


class ExperimentController:
    """
    Controller: CLI → solvers, trainer, exporters

    Responsibilities:
    - Build the market from config, preset and overrides
    - Dispatch to the exact solvers or the trainer
    - Write CSV artifacts and return a JSON-ready summary

    NO numerical logic here!
    """

    def __init__(self, spec: ExperimentSpec):
        """
        Args:
            spec: Experiment request
        """
        self.spec = spec
        self._preset = get_preset(spec.preset) if spec.preset else None

    # ---------------------------------------------------------------- market

    def market(self) -> MarketSpec:
        """
        Raises:
            ConfigurationError: On unknown bonds, preset or invalid overrides
        """
        spec = self.spec
        if self._preset is None:
            return load_market(spec.config_path, spec.bonds, spec.penalty, spec.gamma, spec.discount)
        try:
            market = self._preset.apply(load_market(spec.config_path), spec.bonds or None)
            if spec.penalty is not None or spec.gamma is not None or spec.discount is not None:
                market = market.with_penalty(
                    PenaltyKind(spec.penalty) if spec.penalty else None, spec.gamma, spec.discount
                )
        except ValueError as e:
            raise ConfigurationError(f"invalid override: {e}")
        except InvalidParameterError as e:
            raise ConfigurationError(e.message, e.details)
        return market

    def _out(self, name: str) -> Path:
        try:
            self.spec.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ConfigurationError(f"output directory is not writable: {e}", {"out": str(self.spec.out_dir)})
        return self.spec.out_dir / name

    def _write_summary(self, name: str, summary: dict) -> dict:
        with open(self._out(name), "w", encoding="utf-8") as f:
            json.dump(summary, f, indent=2, sort_keys=True)
        return summary

    # ---------------------------------------------------------------- exact side

    def _fd_config(self) -> FdConfig:
        spec = self.spec
        config = FdConfig()
        if spec.fd_tau is not None:
            config = replace(config, tau=spec.fd_tau)
        if spec.fd_horizon is not None:
            config = replace(config, horizon=spec.fd_horizon)
        if spec.fd_stopping is not None:
            config = replace(config, stopping=StoppingRule(spec.fd_stopping))
        return config

    def _solve_fd(self, market: MarketSpec) -> FdResult:
        return solve_stationary(market, self._fd_config())

    def _solve_exact(self, market: MarketSpec) -> Tuple[ValueTable, PolicyTable]:
        if self.spec.solver is ExactSolver.FINITE_DIFFERENCE:
            table = self._solve_fd(market).table
        else:
            table = value_iteration(market)
        return table, greedy_policy(market, table)

    def solve_vi(self) -> dict:
        """Value iteration; writes values.csv and policy.csv."""
        market = self.market()
        table = value_iteration(market)
        policy = greedy_policy(market, table)
        write_csv(value_frame(table), self._out("values.csv"))
        write_csv(policy_frame(market, policy), self._out("policy.csv"))
        summary = {"solver": "vi", "bonds": list(market.bond_ids), "value_range": table.value_range}
        summary.update(self._exact_rewards(market, policy))
        return self._write_summary("summary.json", summary)

    def solve_fd(self) -> dict:
        """Finite-difference solve; writes values.csv and policy.csv."""
        market = self.market()
        result = self._solve_fd(market)
        policy = greedy_policy(market, result.table)
        write_csv(value_frame(result.table), self._out("values.csv"))
        write_csv(policy_frame(market, policy), self._out("policy.csv"))
        summary = {
            "solver": "fd",
            "bonds": list(market.bond_ids),
            "stop_reason": result.stop_reason.value,
            "steps": result.steps,
            "elapsed_time": result.elapsed_time,
            "last_increment": result.last_increment,
            "hjb_residual": result.hjb_residual,
            "constant_shift": result.constant_shift,
        }
        summary.update(self._exact_rewards(market, policy))
        return self._write_summary("summary.json", summary)

    @staticmethod
    def _exact_rewards(market: MarketSpec, policy: PolicyTable) -> dict:
        return {
            "average_reward_per_rfq": average_reward_per_rfq(market, policy),
            "reward_per_rfq_std": reward_per_rfq_std(market, policy),
        }

    # ---------------------------------------------------------------- learned side

    def _train_config(self, market: MarketSpec) -> TrainConfig:
        spec = self.spec
        if self._preset is not None:
            config = self._preset.train_config(spec.seed)
        else:
            strategy = InitialStrategy.MYOPIC if market.dimension == 1 else InitialStrategy.SINGLE_BOND_OPTIMAL
            config = TrainConfig(initial_strategy=strategy, seed=spec.seed if spec.seed is not None else 0)
        if spec.steps is not None:
            config = replace(config, steps=spec.steps)
        return config

    def _trainer(self, market: MarketSpec, resume: bool) -> ActorCriticTrainer:
        repo = TorchCheckpointRepository(self.spec.checkpoints)
        if resume and repo.steps():
            trainer = ActorCriticTrainer.resume(market, repo)
            if self.spec.steps is not None:
                trainer.config = replace(trainer.config, steps=self.spec.steps)
            logger.info(f"Resuming from step {trainer.step_index}")
            return trainer
        return ActorCriticTrainer(market, self._train_config(market), checkpoints=repo)

    def _learned(self, market: MarketSpec) -> Tuple[Critic, ActorBundle]:
        """Latest checkpointed networks, or a fresh training run when there are none."""
        repo = TorchCheckpointRepository(self.spec.checkpoints)
        if repo.steps():
            trainer = ActorCriticTrainer.resume(market, repo)
            return trainer.critic, trainer.actor
        logger.info("No checkpoint found; training a policy")
        result = self._trainer(market, resume=False).train()
        return result.critic, result.actor

    def train(self) -> dict:
        """Train (or resume); writes learning_curve.csv, checkpoints and the final networks."""
        market = self.market()
        trainer = self._trainer(market, resume=self.spec.resume)
        result = trainer.train()
        trainer.save_checkpoint()
        write_csv(result.curve.to_frame(), self._out("learning_curve.csv"))
        save_network(result.critic.net, self._out("critic.pt"))
        for k in range(len(result.actor.nets)):
            save_network(result.actor.nets[k], self._out(f"actor_{k}.pt"))
        frame = result.curve.to_frame()
        summary = {
            "bonds": list(market.bond_ids),
            "steps": len(result.curve),
            "seed": trainer.config.seed,
            "initial_r_mean": float(result.curve.r_mean[0]),
            "final_r_mean": float(result.curve.r_mean[-1]),
            "final_r_mean_median": float(frame["r_mean_median"].iloc[-1]),
            "pretrain_baseline_r_mean": (
                result.pretrain.baseline_r_mean if result.pretrain is not None else None
            ),
        }
        return self._write_summary("summary.json", summary)

    # ---------------------------------------------------------------- evaluation

    def _policy(self, market: MarketSpec) -> Tuple[PolicyTable, QuoteSource]:
        source = self.spec.policy
        if source is PolicySource.MYOPIC:
            policy = myopic_policy(market)
            return policy, TableQuoteSource(policy)
        if source is PolicySource.LEARNED:
            _, actor = self._learned(market)
            return actor.policy_table(market), actor
        _, policy = self._solve_exact(market)
        return policy, TableQuoteSource(policy)

    def _monte_carlo(self, market: MarketSpec, source: QuoteSource) -> dict:
        streams = RandomStreams(self.spec.seed if self.spec.seed is not None else 0)
        batch = rollout(
            market, source, InventoryState.flat(market.dimension), self.spec.events, None, streams.get("evaluate")
        )
        return {
            "mc_average_reward_per_rfq": estimate_r_mean(batch, market),
            "mc_standard_error": rollout_standard_error(batch, market, SE_BATCHES),
            "mc_events": len(batch),
        }

    def evaluate(self) -> dict:
        """Exact (d ≤ 4) and Monte-Carlo average reward per RFQ of a policy; writes policy.csv."""
        market = self.market()
        policy, source = self._policy(market)
        summary = {"bonds": list(market.bond_ids), "policy": self.spec.policy.value}
        if market.dimension <= EXACT_EVALUATION_MAX_BONDS:
            summary.update(self._exact_rewards(market, policy))
        else:
            logger.info(f"Skipping the exact evaluation for {market.dimension} bonds")
        summary.update(self._monte_carlo(market, source))
        write_csv(policy_frame(market, policy), self._out("policy.csv"))
        return self._write_summary("summary.json", summary)

    # ---------------------------------------------------------------- reports

    def run_compare(self) -> dict:
        """
        Exact vs learned quotes, probabilities and values on every grid point.

        Raises:
            ExperimentError: If the market has more than two bonds
        """
        market = self.market()
        if market.dimension > COMPARE_MAX_BONDS:
            logger.error(f"compare refused for {market.dimension} bonds")
            raise ExperimentError(
                f"exact comparison needs at most {COMPARE_MAX_BONDS} bonds",
                {"bonds": list(market.bond_ids)},
            )
        table, exact = self._solve_exact(market)
        if table.flavor is ValueFlavor.AT_ANY_TIME:
            table = to_rfq_value(market, table)
        exact_values = table.values
        critic, actor = self._learned(market)
        learned = actor.policy_table(market)
        states = learned.grid.states
        learned_values = critic.values(states)
        learned_values = learned_values + float(np.mean(exact_values - learned_values))

        frame = pd.DataFrame(states, columns=state_columns(market.dimension))
        gaps = []
        for i, bond_id in enumerate(market.bond_ids):
            for side, e_delta, l_delta, e_prob, l_prob in (
                ("bid", exact.bid_delta, learned.bid_delta, exact.bid_prob, learned.bid_prob),
                ("ask", exact.ask_delta, learned.ask_delta, exact.ask_prob, learned.ask_prob),
            ):
                frame[f"{bond_id}_{side}_exact_delta"] = e_delta[:, i]
                frame[f"{bond_id}_{side}_learned_delta"] = l_delta[:, i]
                frame[f"{bond_id}_{side}_exact_prob"] = e_prob[:, i]
                frame[f"{bond_id}_{side}_learned_prob"] = l_prob[:, i]
                gaps.append(np.abs(e_prob[:, i] - l_prob[:, i]))
        frame["exact_value"] = exact_values
        frame["learned_value"] = learned_values
        write_csv(frame, self._out("compare.csv"))

        gap = np.concatenate(gaps)
        mc = self._monte_carlo(market, actor)
        summary = {
            "bonds": list(market.bond_ids),
            "solver": self.spec.solver.value,
            "max_abs_prob_gap": float(gap.max()),
            "mean_abs_prob_gap": float(gap.mean()),
            "exact_average_reward_per_rfq": average_reward_per_rfq(market, exact),
            "learned_average_reward_per_rfq": mc["mc_average_reward_per_rfq"],
            "learned_standard_error": mc["mc_standard_error"],
            "learned_events": mc["mc_events"],
        }
        return self._write_summary("compare_summary.json", summary)

    def run_table4(self) -> dict:
        """
        Per-bond exact average reward per RFQ, in market order.

        A failing bond gets status "error" and the run continues.
        """
        market = self.market()
        rows = []
        for bond_id in market.bond_ids:
            single = market.subset([bond_id])
            try:
                _, policy = self._solve_exact(single)
                reward = average_reward_per_rfq(single, policy)
                std = reward_per_rfq_std(single, policy)
                rows.append({
                    "bond": bond_id,
                    "average_reward_per_rfq": reward,
                    "reward_per_rfq_std": std,
                    "mc_band": 3.0 * std / math.sqrt(TABLE_MC_EVENTS),
                    "status": "ok",
                    "message": "",
                })
                logger.info(f"{bond_id}: average reward per RFQ {reward:.2f}")
            except RfqMakerException as e:
                logger.error(f"{bond_id}: {e.message}")
                rows.append({
                    "bond": bond_id,
                    "average_reward_per_rfq": np.nan,
                    "reward_per_rfq_std": np.nan,
                    "mc_band": np.nan,
                    "status": "error",
                    "message": f"{type(e).__name__}: {e.message}",
                })
        write_csv(pd.DataFrame(rows), self._out("table4.csv"))
        failed = [r["bond"] for r in rows if r["status"] != "ok"]
        summary = {
            "penalty": market.penalty.kind.value,
            "gamma": market.penalty.gamma,
            "solver": self.spec.solver.value,
            "bonds": len(rows),
            "failed": failed,
        }
        return self._write_summary("table4_summary.json", summary)

    def emit_plotdata(self, kind: Optional[str] = None) -> dict:
        """
        Write <kind>.csv.

        Kinds: learning_curve (from the checkpoint directory), quotes (policy
        surface of --policy), values (exact value table), value_diff (FD value
        against the value of its greedy policy, each shifted by its maximum).

        Raises:
            ExperimentError: On an unknown kind or a missing artifact
        """
        kind = kind or self.spec.plot_kind
        if kind not in PLOT_KINDS:
            raise ExperimentError(f"unknown plot kind '{kind}'", {"kind": kind, "known": list(PLOT_KINDS)})

        if kind == "learning_curve":
            state = TorchCheckpointRepository(self.spec.checkpoints).latest()
            if state is None:
                raise ExperimentError("no training run to plot", {"checkpoints": str(self.spec.checkpoints)})
            frame = LearningCurve.from_dict(state["curve"]).to_frame()
        else:
            market = self.market()
            if kind == "quotes":
                policy, _ = self._policy(market)
                frame = policy_frame(market, policy)
            elif kind == "values":
                table, _ = self._solve_exact(market)
                frame = value_frame(table)
            else:
                solved = self._solve_fd(market).table
                evaluated = policy_evaluation(market, greedy_policy(market, solved))
                frame = value_difference_frame(solved, evaluated)
        path = write_csv(frame, self._out(f"{kind}.csv"))
        return {"kind": kind, "rows": len(frame), "path": str(path)}
