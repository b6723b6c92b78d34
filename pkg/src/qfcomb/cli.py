"""Command-line front end.

    qfcomb <command> --config run.json [--out PATH] [--format json|csv|pgm] [--seed N]

Commands: synth, entropy, walk, sweep, steering-theory, tomo-sim, tomo-fit.
Exit codes: 0 success, 2 invalid configuration, 3 numerical contract failure.
"""

import argparse
from dataclasses import dataclass
import json
import math
import sys

import jsonschema
import numpy as np

from . import comb, entanglement, tomography, walk
from .numerics import NumericsError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
COMMANDS = ("synth", "entropy", "walk", "sweep", "steering-theory", "tomo-sim", "tomo-fit")


class ConfigError(ValueError):
    pass


# --- config schema ---------------------------------------------------------

_number = {"type": "number"}
_phase_map = {"type": "object", "patternProperties": {r"^-?\d+$": _number}, "additionalProperties": False}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "state": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "N": {"type": "integer", "minimum": 3},
                "include_degenerate": {"type": "boolean"},
                "weights": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "explicit": {
                            "type": "object",
                            "patternProperties": {
                                r"^-?\d+$": {
                                    "oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]
                                }
                            },
                            "additionalProperties": False,
                        },
                        "gaussian": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["sigma", "p"],
                            "properties": {
                                "a0": _number,
                                "mu": _number,
                                "sigma": _number,
                                "p": {"type": "integer", "minimum": 0},
                                "convention": {"enum": ["sigma", "sigma_prime"]},
                            },
                        },
                    },
                    "minProperties": 1,
                    "maxProperties": 1,
                },
                "qudit": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["d"],
                    "properties": {
                        "d": {"enum": [2, 3]},
                        "c1": _number,
                        "c2": _number,
                        "phase1": _number,
                        "phase2": _number,
                    },
                },
                "postselect": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["signal", "idler"],
                    "properties": {
                        "signal": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
                        "idler": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
                    },
                },
            },
        },
        "mask": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "pattern": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["odd", "even"],
                    "properties": {"odd": _number, "even": _number},
                },
                "phases": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["signal"],
                    "properties": {"signal": _phase_map, "idler": _phase_map},
                },
            },
            "minProperties": 1,
            "maxProperties": 1,
        },
        "walk": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "delta": {"type": "number", "minimum": 0},
                "delta_grid": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 2},
                "phi_rf": _number,
                "guard": {"type": "integer", "minimum": 1},
            },
        },
        "steering": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "omega_ceo": _number,
                "omega_fsr": {"type": "number", "exclusiveMinimum": 0},
                "g1_abs": {"type": "number", "minimum": 0},
                "phi_rf": _number,
                "grid": {"type": "integer", "minimum": 4},
            },
        },
        "tomo": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "d": {"enum": [2, 3]},
                "scale": {"type": "number", "exclusiveMinimum": 0},
                "noise": {"enum": ["exact", "poisson"]},
                "seed": {"type": "integer", "minimum": 0},
                "depolarize": {"type": "number", "minimum": 0, "maximum": 1},
                "counts": {"type": "string"},
                "fsr_label": {"type": "string"},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"format": {"enum": ["json", "csv", "pgm"]}, "path": {"type": "string"}},
        },
    },
}


def validate_config(cfg):
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {loc}: {exc.message}") from None
    state = cfg.get("state", {})
    if "qudit" in state and ("weights" in state or "N" in state):
        raise ConfigError("state.qudit cannot be combined with N/weights")
    return cfg


# --- config -> library objects ----------------------------------------------

def _complex(v):
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def build_state(cfg):
    st = cfg.get("state")
    if st is None:
        raise ConfigError("config needs a 'state' section")
    if "qudit" in st:
        q = st["qudit"]
        state = comb.qudit_target_state(q["d"], q.get("c1", 0.0), q.get("c2", 0.0), q.get("phase1", 0.0), q.get("phase2", 0.0))
    else:
        if "N" not in st or "weights" not in st:
            raise ConfigError("state needs N and weights (or a qudit block)")
        conv = comb.ModeConvention(st["N"], st.get("include_degenerate", False))
        w = st["weights"]
        if "explicit" in w:
            spec = comb.WeightSpec.explicit({int(k): _complex(v) for k, v in w["explicit"].items()})
        else:
            g = w["gaussian"]
            spec = comb.WeightSpec.gaussian(
                g["sigma"], g["p"], g.get("a0", 1.0), g.get("mu", 0.0), g.get("convention", "sigma")
            )
        state = comb.synthesize(conv, spec)
    if "postselect" in st:
        state = comb.subspace_postselect(state, st["postselect"]["signal"], st["postselect"]["idler"])
    return state


def build_masks(cfg):
    m = cfg.get("mask")
    if m is None:
        return comb.PhaseMask.zeros(), None
    if "pattern" in m:
        return comb.PhaseMask.pattern(m["pattern"]["odd"], m["pattern"]["even"]), None
    ph = m["phases"]
    sig = comb.PhaseMask({int(k): v for k, v in ph["signal"].items()})
    idl = comb.PhaseMask({int(k): v for k, v in ph["idler"].items()}) if "idler" in ph else None
    return sig, idl


# --- emitters -----------------------------------------------------------------

@dataclass(frozen=True)
class HeatmapImage:
    cells: np.ndarray
    vmax: float = None

    def __post_init__(self):
        c = np.asarray(self.cells, dtype=float)
        if c.ndim != 2 or c.size == 0:
            raise ValueError("heatmap needs a non-empty 2-D array")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise ValueError("heatmap cells must be finite and non-negative")
        object.__setattr__(self, "cells", c)
        if self.vmax is None:
            object.__setattr__(self, "vmax", float(c.max()))

    @property
    def height(self):
        return self.cells.shape[0]

    @property
    def width(self):
        return self.cells.shape[1]


def emit_heatmap(img, fmt):
    """Serialize a heatmap as CSV (``%.12e``) or plain PGM (P2, maxval 255)."""
    if fmt == "csv":
        lines = [",".join("%.12e" % v for v in row) for row in img.cells]
        return ("\n".join(lines) + "\n").encode("utf-8")
    if fmt == "pgm":
        if img.vmax > 0:
            scaled = np.floor(255.0 * img.cells / img.vmax + 0.5).astype(int)
        else:
            scaled = np.zeros(img.cells.shape, dtype=int)
        scaled = np.clip(scaled, 0, 255)
        lines = ["P2", f"{img.width} {img.height}", "255"]
        lines += [" ".join(str(v) for v in row) for row in scaled]
        return ("\n".join(lines) + "\n").encode("ascii")
    raise ValueError(f"unsupported heatmap format {fmt!r}")


def _cplx(a):
    a = np.asarray(a)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _real(a):
    return [[float(v) for v in row] for row in np.asarray(a)]


def _matrix_block(a, complex_valued=False):
    a = np.asarray(a)
    return {"dims": list(a.shape), "matrix": _cplx(a) if complex_valued else _real(a)}


def _entropy_block(rep):
    return {
        "eigenvalues": [float(v) for v in rep.eigenvalues],
        "S_A": rep.absolute,
        "S_N": rep.normalized,
        "log_base": rep.log_base,
        "rank": rep.rank,
    }


def emit_json(payload):
    return (json.dumps(payload, sort_keys=True, indent=1, allow_nan=False) + "\n").encode("utf-8")


# --- commands ---------------------------------------------------------------

def _state_payload(state):
    rho = entanglement.density_from_pure(state)
    s_sig, s_idl = entanglement.entropies(rho)
    return {
        "signal_modes": list(state.signal_modes),
        "idler_modes": list(state.idler_modes),
        "amplitudes": _matrix_block(state.amplitudes, True),
        "jsi": _matrix_block(comb.jsi(state)),
        "S_A": s_sig.absolute,
        "S_N": s_sig.normalized,
        "entropy_signal": _entropy_block(s_sig),
        "entropy_idler": _entropy_block(s_idl),
    }


def cmd_synth(cfg):
    state = build_state(cfg)
    if "mask" in cfg:
        state = comb.apply_phase_mask(state, *build_masks(cfg))
    return {"command": "synth", **_state_payload(state)}, HeatmapImage(comb.jsi(state))


def cmd_entropy(cfg):
    state = build_state(cfg)
    rho = entanglement.density_from_pure(state)
    s_sig, s_idl = entanglement.entropies(rho)
    out = {
        "command": "entropy",
        "entropy_signal": _entropy_block(s_sig),
        "entropy_idler": _entropy_block(s_idl),
        "purity": entanglement.purity(rho),
        "log_negativity": entanglement.log_negativity(rho),
    }
    if rho.dims == (2, 2):
        c, ef = entanglement.concurrence_and_eof(rho)
        out["concurrence"] = c
        out["entanglement_of_formation"] = ef
    reduced = entanglement.partial_trace(rho, "signal")
    return out, HeatmapImage(np.abs(reduced))


def _walk_params(cfg):
    w = cfg.get("walk", {})
    return w.get("phi_rf", math.pi / 2), w.get("guard")


def cmd_walk(cfg):
    state = comb.apply_phase_mask(build_state(cfg), *build_masks(cfg))
    w = cfg.get("walk", {})
    if "delta" not in w:
        raise ConfigError("walk needs walk.delta")
    phi_rf, guard = _walk_params(cfg)
    ecfg = walk.lattice_for(state, w["delta"], guard, phi_rf)
    out_state = walk.evolve(state, ecfg)
    levels, dist = walk.energy_distribution(out_state)
    payload = {
        "command": "walk",
        "delta": w["delta"],
        "phi_rf": phi_rf,
        "modes": list(out_state.signal_modes),
        "jsi": _matrix_block(comb.jsi(out_state)),
        "mean_energy_shift": walk.mean_total_energy(out_state) - walk.mean_total_energy(state),
        "energy_levels": [int(v) for v in levels],
        "energy_distribution": [float(v) for v in dist],
    }
    return payload, HeatmapImage(comb.jsi(out_state))


def cmd_sweep(cfg):
    state = build_state(cfg)
    mask_s, mask_i = build_masks(cfg)
    w = cfg.get("walk", {})
    if "delta_grid" not in w:
        raise ConfigError("sweep needs walk.delta_grid")
    phi_rf, guard = _walk_params(cfg)
    try:
        res = walk.sweep_and_slope(state, mask_s, w["delta_grid"], phi_rf, guard, mask_i)
    except ValueError as exc:
        if isinstance(exc, walk.WalkConfigError):
            raise
        raise ConfigError(str(exc)) from None
    payload = {
        "command": "sweep",
        "phi_rf": phi_rf,
        "deltas": [float(v) for v in res.deltas],
        "mean_energy": [float(v) for v in res.mean_energy],
        "energy_levels": [int(v) for v in res.energy_levels],
        "distributions": _real(res.distributions),
        "slope": res.slope,
        "intercept": res.intercept,
        "residual": res.residual,
    }
    return payload, HeatmapImage(res.distributions)


def _energy_scale(cfg):
    s = cfg.get("steering", {})
    return walk.EnergyScale(
        s.get("omega_ceo", 0.0), s.get("omega_fsr", 1.0), s.get("g1_abs", walk.CALIBRATED_G1), s.get("phi_rf", math.pi / 2)
    ), s.get("grid", 360)


def cmd_steering(cfg):
    state = comb.apply_phase_mask(build_state(cfg), *build_masks(cfg))
    scale, grid = _energy_scale(cfg)
    chi = walk.chi_expectation(state)
    payload = {
        "command": "steering-theory",
        "chi": [chi.real, chi.imag],
        "phi_rf": scale.phi_rf,
        "g1_abs": scale.g1_abs,
        "omega_fsr": scale.omega_fsr,
        "energy_transfer_rate": walk.energy_transfer_rate(state, scale),
        "desync_grid": grid,
        "desync_average": walk.desync_average(state, scale, grid),
    }
    return payload, None


def _tomo_state(cfg):
    t = cfg.get("tomo", {})
    state = build_state(cfg)
    rho = entanglement.density_from_pure(state)
    if "depolarize" in t:
        rho = entanglement.depolarize(rho, t["depolarize"])
    d = t.get("d", rho.dims[0])
    if rho.dims != (d, d):
        raise ConfigError(f"state dims {rho.dims} do not match tomo.d={d} (post-select a {d}x{d} block)")
    return rho, tomography.projector_set(d)


def cmd_tomo_sim(cfg, seed):
    t = cfg.get("tomo", {})
    rho, projs = _tomo_state(cfg)
    noise = t.get("noise", "exact")
    seed = t.get("seed") if seed is None else seed
    if noise == "poisson" and seed is None:
        raise ConfigError("Poisson noise requires an explicit seed (tomo.seed or --seed)")
    records = tomography.simulate_counts(rho, projs, t.get("scale", 1e5), noise, seed)
    payload = {
        "command": "tomo-sim",
        "d": projs.d,
        "noise": noise,
        "seed": seed,
        "scale": t.get("scale", 1e5),
        "fsr_label": t.get("fsr_label"),
        "counts": [{"label": r.label, "count": r.count, "correction": r.correction} for r in records],
    }
    return payload, tomography.write_counts_csv(records).encode("utf-8")


def cmd_tomo_fit(cfg):
    t = cfg.get("tomo", {})
    if "counts" not in t:
        raise ConfigError("tomo-fit needs tomo.counts (path to a count CSV)")
    try:
        with open(t["counts"], encoding="utf-8", newline="") as fh:
            records = tomography.read_counts_csv(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read counts: {exc}") from None
    except tomography.TomographyError as exc:
        raise ConfigError(str(exc)) from None
    d = t.get("d", 2)
    projs = tomography.projector_set(d)
    rho = tomography.mle_reconstruct(records, projs)
    s_sig, s_idl = entanglement.entropies(rho)
    payload = {
        "command": "tomo-fit",
        "d": d,
        "fsr_label": t.get("fsr_label"),
        "density_matrix": _matrix_block(rho.matrix, True),
        "purity": entanglement.purity(rho),
        "entropy_signal": _entropy_block(s_sig),
        "entropy_idler": _entropy_block(s_idl),
        "log_negativity": entanglement.log_negativity(rho),
    }
    if d == 2:
        c, ef = entanglement.concurrence_and_eof(rho)
        payload["concurrence"] = c
        payload["entanglement_of_formation"] = ef
    if "state" in cfg:
        target, _ = _tomo_state(cfg)
        payload["fidelity"] = entanglement.fidelity(rho, target)
    return payload, HeatmapImage(np.abs(rho.matrix))


def run(command, cfg, fmt="json", seed=None):
    """Execute one command; returns the output bytes."""
    validate_config(cfg)
    if command == "tomo-sim":
        payload, counts_csv = cmd_tomo_sim(cfg, seed)
        if fmt == "csv":
            return counts_csv
        if fmt == "pgm":
            raise ConfigError("tomo-sim emits json or csv")
        return emit_json(payload)
    handlers = {
        "synth": cmd_synth,
        "entropy": cmd_entropy,
        "walk": cmd_walk,
        "sweep": cmd_sweep,
        "steering-theory": cmd_steering,
        "tomo-fit": cmd_tomo_fit,
    }
    if command not in handlers:
        raise ConfigError(f"unknown command {command!r}")
    payload, image = handlers[command](cfg)
    if fmt == "json":
        return emit_json(payload)
    if image is None:
        raise ConfigError(f"{command} has no matrix output; use --format json")
    return emit_heatmap(image, fmt)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="qfcomb", description="Biphoton frequency-comb simulator")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", help="output path (default: output.path or stdout)")
    parser.add_argument("--format", choices=("json", "csv", "pgm"), help="output format")
    parser.add_argument("--seed", type=int, help="seed for randomized paths")
    args = parser.parse_args(argv)

    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot load config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None and args.seed < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return EXIT_CONFIG

    out_cfg = cfg.get("output", {}) if isinstance(cfg, dict) else {}
    fmt = args.format or out_cfg.get("format", "json")
    path = args.out or out_cfg.get("path")
    try:
        data = run(args.command, cfg, fmt, args.seed)
    except (ConfigError, comb.CombError, entanglement.EntanglementError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (walk.WalkConfigError, tomography.TomographyError, NumericsError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if path:
        with open(path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
