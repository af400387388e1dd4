"""Run configuration: one JSON document drives every command.

Defaults are the experiment's operating point (N = 8 phases at mean photon
number 0.16, the detector constants of ``ChannelModel``).  Unknown keys are
rejected at every nesting level, and serialising a parsed config reproduces
it byte-for-byte (all defaults are materialised on parse).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .channel import ChannelModel
from .simulate import (
    ActiveForger,
    AliceStrategy,
    BlockedInput,
    BobStrategy,
    HonestAlice,
    HonestBob,
    PassiveForger,
    PhaseTamper,
    TwoStateRepudiator,
)
from .states import PhaseAlphabet


class ConfigError(ValueError):
    """Invalid or unknown configuration content."""


def _check_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


_ALICE_KEYS = {
    "honest": set(),
    "phase_tamper": {"delta_phi", "tamper_fraction"},
    "two_state_repudiator": {"bob_phase_index", "charlie_phase_index"},
    "blocked_input": {"blocked"},
}
_BOB_KEYS = {
    "honest": set(),
    "passive_forger": set(),
    "active_forger": {"response_scale"},
}


def _parse_alice(section: dict) -> AliceStrategy:
    name = section.get("strategy", "honest")
    if name not in _ALICE_KEYS:
        raise ConfigError(f"unknown alice strategy {name!r}")
    _check_keys(section, _ALICE_KEYS[name] | {"strategy"}, f"simulation.alice ({name})")
    params = {k: v for k, v in section.items() if k != "strategy"}
    try:
        if name == "honest":
            return HonestAlice()
        if name == "phase_tamper":
            return PhaseTamper(**params)
        if name == "two_state_repudiator":
            return TwoStateRepudiator(**params)
        return BlockedInput(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad alice strategy parameters: {exc}") from exc


def _parse_bob(section: dict) -> BobStrategy:
    name = section.get("strategy", "honest")
    if name not in _BOB_KEYS:
        raise ConfigError(f"unknown bob strategy {name!r}")
    _check_keys(section, _BOB_KEYS[name] | {"strategy"}, f"simulation.bob ({name})")
    params = {k: v for k, v in section.items() if k != "strategy"}
    try:
        if name == "honest":
            return HonestBob()
        if name == "passive_forger":
            return PassiveForger()
        return ActiveForger(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad bob strategy parameters: {exc}") from exc


def _strategy_dict(strategy) -> dict:
    d = {"strategy": strategy.name}
    for f in getattr(strategy, "__dataclass_fields__", {}):
        d[f] = getattr(strategy, f)
    return d


@dataclass
class RunConfig:
    """Validated configuration shared by all commands."""

    alphabet: PhaseAlphabet
    channel: ChannelModel
    channel_calibrated: bool
    receivers: int
    master_seed: int
    # analysis
    cost_matrix_path: str | None
    reference_length: float
    repudiation_base: float
    rejection_threshold: float | None
    hoeffding_slack: float | None
    helstrom_tol: float
    sweep_start: float
    sweep_stop: float
    sweep_points: int
    # entropy
    entropy_n_values: list[int]
    entropy_grid_start: float
    entropy_grid_stop: float
    entropy_grid_points: int
    # simulation
    signature_length: int
    trials: int
    alice: AliceStrategy
    bob: BobStrategy
    sim_s_a: float | None
    sim_s_v: float | None
    sim_rejection_threshold: float | None
    sim_cost_matrix_path: str | None
    bob_extra_loss_db: float
    write_transcript: bool
    estimate_pulses: int

    @classmethod
    def parse(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config root must be a JSON object")
        _check_keys(
            doc,
            {"alphabet", "channel", "receivers", "master_seed", "analysis", "entropy", "simulation"},
            "config root",
        )

        alpha_sec = dict(doc.get("alphabet", {}))
        _check_keys(alpha_sec, {"n_phases", "mean_photons"}, "alphabet")
        n_phases = int(alpha_sec.get("n_phases", 8))
        mean_photons = float(alpha_sec.get("mean_photons", 0.16))
        try:
            alphabet = PhaseAlphabet(n_phases, math.sqrt(mean_photons))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

        chan_sec = dict(doc.get("channel", {}))
        calibrated = bool(chan_sec.pop("calibrated", True))
        _check_keys(chan_sec, set(ChannelModel.__dataclass_fields__), "channel")
        if calibrated and ({"mu_scale", "gate_background"} & set(chan_sec)):
            raise ConfigError(
                "channel.calibrated fits mu_scale and gate_background; "
                "set calibrated to false to supply them explicitly"
            )
        try:
            channel = (
                ChannelModel.calibrated(**chan_sec) if calibrated else ChannelModel.from_dict(chan_sec)
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad channel section: {exc}") from exc

        ana = dict(doc.get("analysis", {}))
        _check_keys(
            ana,
            {
                "cost_matrix_path", "reference_length", "repudiation_base",
                "rejection_threshold", "hoeffding_slack", "helstrom_tol", "sweep",
            },
            "analysis",
        )
        sweep = dict(ana.get("sweep", {}))
        _check_keys(sweep, {"start", "stop", "points"}, "analysis.sweep")

        ent = dict(doc.get("entropy", {}))
        _check_keys(ent, {"n_values", "mean_photon_grid"}, "entropy")
        grid = dict(ent.get("mean_photon_grid", {}))
        _check_keys(grid, {"start", "stop", "points"}, "entropy.mean_photon_grid")
        n_values = [int(n) for n in ent.get("n_values", [2, 4, 8, 16, 32])]
        if any(n < 2 for n in n_values):
            raise ConfigError("entropy.n_values entries must be >= 2")
        grid_start = float(grid.get("start", 0.0))
        grid_stop = float(grid.get("stop", 2.0))
        grid_points = int(grid.get("points", 81))
        if grid_points < 2 or grid_stop <= grid_start or grid_start < 0:
            raise ConfigError("entropy.mean_photon_grid must be an increasing nonnegative range")

        sim = dict(doc.get("simulation", {}))
        _check_keys(
            sim,
            {
                "signature_length", "trials", "alice", "bob", "s_a", "s_v",
                "rejection_threshold", "cost_matrix_path", "bob_extra_loss_db",
                "write_transcript", "estimate_pulses",
            },
            "simulation",
        )

        try:
            return cls(
                alphabet=alphabet,
                channel=channel,
                channel_calibrated=calibrated,
                receivers=int(doc.get("receivers", 2)),
                master_seed=int(doc.get("master_seed", 20120917)),
                cost_matrix_path=ana.get("cost_matrix_path"),
                reference_length=float(ana.get("reference_length", 1e7)),
                repudiation_base=float(ana.get("repudiation_base", 0.5)),
                rejection_threshold=ana.get("rejection_threshold"),
                hoeffding_slack=ana.get("hoeffding_slack"),
                helstrom_tol=float(ana.get("helstrom_tol", 1e-9)),
                sweep_start=float(sweep.get("start", 1e5)),
                sweep_stop=float(sweep.get("stop", 1e9)),
                sweep_points=int(sweep.get("points", 41)),
                entropy_n_values=n_values,
                entropy_grid_start=grid_start,
                entropy_grid_stop=grid_stop,
                entropy_grid_points=grid_points,
                signature_length=int(sim.get("signature_length", 100_000)),
                trials=int(sim.get("trials", 100)),
                alice=_parse_alice(dict(sim.get("alice", {"strategy": "honest"}))),
                bob=_parse_bob(dict(sim.get("bob", {"strategy": "honest"}))),
                sim_s_a=sim.get("s_a"),
                sim_s_v=sim.get("s_v"),
                sim_rejection_threshold=sim.get("rejection_threshold"),
                sim_cost_matrix_path=sim.get("cost_matrix_path"),
                bob_extra_loss_db=float(sim.get("bob_extra_loss_db", 0.0)),
                write_transcript=bool(sim.get("write_transcript", False)),
                estimate_pulses=int(sim.get("estimate_pulses", 1_000_000)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError:
            raise
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.parse(doc)

    @classmethod
    def default(cls) -> "RunConfig":
        return cls.parse({})

    def to_dict(self) -> dict:
        return {
            "alphabet": {
                "n_phases": self.alphabet.n_phases,
                "mean_photons": self.alphabet.mean_photons,
            },
            "channel": {
                "calibrated": self.channel_calibrated,
                **{
                    k: v
                    for k, v in self.channel.to_dict().items()
                    if not (self.channel_calibrated and k in ("mu_scale", "gate_background"))
                },
            },
            "receivers": self.receivers,
            "master_seed": self.master_seed,
            "analysis": {
                "cost_matrix_path": self.cost_matrix_path,
                "reference_length": self.reference_length,
                "repudiation_base": self.repudiation_base,
                "rejection_threshold": self.rejection_threshold,
                "hoeffding_slack": self.hoeffding_slack,
                "helstrom_tol": self.helstrom_tol,
                "sweep": {
                    "start": self.sweep_start,
                    "stop": self.sweep_stop,
                    "points": self.sweep_points,
                },
            },
            "entropy": {
                "n_values": self.entropy_n_values,
                "mean_photon_grid": {
                    "start": self.entropy_grid_start,
                    "stop": self.entropy_grid_stop,
                    "points": self.entropy_grid_points,
                },
            },
            "simulation": {
                "signature_length": self.signature_length,
                "trials": self.trials,
                "alice": _strategy_dict(self.alice),
                "bob": _strategy_dict(self.bob),
                "s_a": self.sim_s_a,
                "s_v": self.sim_s_v,
                "rejection_threshold": self.sim_rejection_threshold,
                "cost_matrix_path": self.sim_cost_matrix_path,
                "bob_extra_loss_db": self.bob_extra_loss_db,
                "write_transcript": self.write_transcript,
                "estimate_pulses": self.estimate_pulses,
            },
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


PRESETS = {
    "honest": {"alice": {"strategy": "honest"}, "bob": {"strategy": "honest"}},
    "passive-forger": {"alice": {"strategy": "honest"}, "bob": {"strategy": "passive_forger"}},
    "tamper-pi4": {
        "alice": {"strategy": "phase_tamper", "delta_phi": math.pi / 4, "tamper_fraction": 2 / 16},
        "bob": {"strategy": "honest"},
    },
    "tamper-pi2": {
        "alice": {"strategy": "phase_tamper", "delta_phi": math.pi / 2, "tamper_fraction": 2 / 16},
        "bob": {"strategy": "honest"},
    },
    "tamper-pi": {
        "alice": {"strategy": "phase_tamper", "delta_phi": math.pi, "tamper_fraction": 2 / 16},
        "bob": {"strategy": "honest"},
    },
    "blocked-input": {
        "alice": {"strategy": "blocked_input", "blocked": "charlie"},
        "bob": {"strategy": "honest"},
        "bob_extra_loss_db": 6.0,
    },
    "repudiator": {
        "alice": {"strategy": "two_state_repudiator", "bob_phase_index": 0, "charlie_phase_index": 1},
        "bob": {"strategy": "honest"},
    },
    "active-forger": {"alice": {"strategy": "honest"}, "bob": {"strategy": "active_forger"}},
}


def apply_preset(config: RunConfig, preset: str) -> RunConfig:
    """Overlay a named simulation scenario on a parsed config."""
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    doc = config.to_dict()
    overlay = PRESETS[preset]
    doc["simulation"]["alice"] = overlay["alice"]
    doc["simulation"]["bob"] = overlay["bob"]
    if "bob_extra_loss_db" in overlay:
        doc["simulation"]["bob_extra_loss_db"] = overlay["bob_extra_loss_db"]
    return RunConfig.parse(doc)
