"""Command line interface.

Subcommands: ``group``, ``trajectory``, ``access``, ``volume``, ``spectra``
and ``boundary``.  Output is data only (CSV or JSON).  Exit codes: 0 on
success, 2 for invalid input, 3 for numeric failures; errors are written to
stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .accessibility import (
    AccessClassifier,
    boundary_curves,
    is_accessible_map,
    is_accessible_weights,
)
from .builtins import (
    REFERENCE_FRACTIONS,
    analytic_ratio,
    builtin_representation,
)
from .channels import Representation, affine_dimension, hs_distance, mixture, realize
from .dynamics import RateSchedule, trajectory_csv, weight_table
from .errors import GroupAccessError, InvalidInput, NumericFailure
from .geometry import (
    B3_CENTER,
    PolytopeSampler,
    b3_cross_sections,
    b3_projections,
    embed,
    make_rng,
    mc_accessible_fraction,
)
from .groups import enumerate_subgroups, parse_group_document
from .io import load_matrix

EXIT_INVALID = 2
EXIT_NUMERIC = 3


@dataclass
class ExperimentConfig:
    """Resolved command line options shared by all subcommands."""

    builtin: str | None = None
    group_file: str | None = None
    samples: int = 1000
    seed: int = 0
    tol: float = 1e-8
    fmt: str = "json"
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if (self.builtin is None) == (self.group_file is None):
            raise InvalidInput("give exactly one of --builtin or --group-file")
        if self.samples < 1:
            raise InvalidInput("samples must be at least 1")
        if not self.tol > 0:
            raise InvalidInput("tol must be positive")
        if self.fmt not in ("csv", "json"):
            raise InvalidInput("format must be csv or json")
        if self.workers < 1:
            raise InvalidInput("workers must be at least 1")

    @property
    def name(self) -> str:
        return self.builtin or os.path.basename(self.group_file)

    def representation(self) -> Representation:
        if self.builtin is not None:
            return builtin_representation(self.builtin)
        try:
            with open(self.group_file, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise InvalidInput(f"cannot read {self.group_file}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"bad JSON in {self.group_file}: {exc}") from None
        specs = parse_group_document(doc)
        return realize(specs, kind=doc.get("representation"))


# ---------------------------------------------------------------------------
# helpers


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",") if x.strip()], dtype=float)
    except ValueError:
        raise InvalidInput(f"expected a comma separated list of numbers, got {text!r}") from None


def parse_rates(text: str | None, g: int) -> np.ndarray:
    """Rates from a comma list of length ``g`` (first 0) or ``g - 1``."""
    if text is None:
        return RateSchedule.uniform(g).q
    q = parse_floats(text)
    if q.size == g - 1:
        q = np.concatenate([[0.0], q])
    if q.size != g:
        raise InvalidInput(f"need {g - 1} or {g} rates, got {q.size}")
    return q


def _time_grid(t_max: float, steps: int) -> np.ndarray:
    if not t_max >= 0 or steps < 1:
        raise InvalidInput("need t-max >= 0 and steps >= 1")
    return np.linspace(0.0, t_max, steps + 1)


# ---------------------------------------------------------------------------
# commands


def cmd_group(cfg: ExperimentConfig) -> dict:
    """Order, element orders, subgroups, affine dimension and distances."""
    rep = cfg.representation()
    t = rep.group
    report = {
        "group": cfg.name,
        "order": t.order,
        "labels": list(t.labels),
        "element_orders": [int(h) for h in t.element_order],
        "abelian": t.is_abelian(),
        "representation": rep.kind,
        "dimension": rep.dim,
        "affine_dimension": affine_dimension(rep),
    }
    if t.order <= 64:
        subs = enumerate_subgroups(t)
        report["subgroup_orders"] = subs.orders()
        report["subgroups"] = [{"elements": list(s.elements), "order": s.order, "cyclic": s.cyclic}
                               for s in subs]
    if t.order <= 64:
        m = rep.matrices
        report["distances"] = [[hs_distance(m[i], m[j]) for j in range(t.order)]
                               for i in range(t.order)]
    return report


def cmd_trajectory(cfg: ExperimentConfig, rates=None, t_max=5.0, steps=100):
    """Weights ``w(t)`` on a uniform time grid."""
    rep = cfg.representation()
    t = rep.group
    q = RateSchedule(parse_rates(rates, t.order) if isinstance(rates, (str, type(None)))
                     else np.asarray(rates, float))
    grid = _time_grid(t_max, steps)
    if cfg.fmt == "csv":
        return trajectory_csv(t, q, grid)
    w = weight_table(t, q, grid)
    return {"labels": list(t.labels), "rates": q.q.tolist(), "t": grid.tolist(),
            "weights": w.tolist()}


def cmd_access(cfg: ExperimentConfig, weights=None, matrix=None, regular=False) -> dict:
    """Accessibility verdict for a weight vector or an explicit matrix."""
    rep = cfg.representation()
    if (weights is None) == (matrix is None):
        raise InvalidInput("give exactly one of --weights or --matrix")
    if weights is not None:
        p = parse_floats(weights) if isinstance(weights, str) else np.asarray(weights, float)
        if regular:
            v = is_accessible_weights(rep.group, p, cfg.tol)
        else:
            v = is_accessible_map(mixture(rep, p), rep, cfg.tol)
    else:
        M = load_matrix(matrix) if isinstance(matrix, str) else np.asarray(matrix)
        v = is_accessible_map(M, rep, cfg.tol)
    out = v.to_dict()
    out["group"] = cfg.name
    return out


def cmd_volume(cfg: ExperimentConfig, method: str = "auto") -> dict:
    """Monte Carlo accessible fraction with an analytic comparison if known."""
    rep = cfg.representation()
    est = mc_accessible_fraction(rep, cfg.samples, cfg.seed, cfg.tol, cfg.workers, method)
    out = est.to_dict()
    out["group"] = cfg.name
    ref = analytic_ratio(cfg.builtin) if cfg.builtin else None
    if ref is not None:
        out["analytic"] = ref
        out["deviation_sigma"] = (est.fraction - ref) / est.std_error if est.std_error else None
        out["matches_analytic_3sigma"] = bool(abs(est.fraction - ref) <= 3 * est.std_error)
    elif cfg.builtin in REFERENCE_FRACTIONS:
        val, err = REFERENCE_FRACTIONS[cfg.builtin]
        out["reference"] = val
        out["reference_error"] = err
        tol = max(3 * est.std_error, 0.0005)
        out["matches_reference"] = bool(abs(est.fraction - val) <= tol)
    return out


def cmd_spectra(cfg: ExperimentConfig) -> str | dict:
    """Eigenvalues of uniformly sampled mixtures tagged by accessibility."""
    rep = cfg.representation()
    n = cfg.samples
    if rep.order == 1:
        W = np.ones((n, 1))
    else:
        sampler = PolytopeSampler(embed(rep))
        W = sampler.sample(n, make_rng(cfg.seed)).weights
    acc = AccessClassifier(rep, cfg.tol).classify(W)
    M = np.tensordot(W, rep.matrices, axes=1)
    ev = np.linalg.eigvals(M)
    rows = [(i, z.real, z.imag, int(a)) for i, (zs, a) in enumerate(zip(ev, acc)) for z in zs]
    if cfg.fmt == "csv":
        return _csv(["sample", "re", "im", "accessible"], rows)
    return {"group": cfg.name, "eigenvalues": [[r[1], r[2]] for r in rows],
            "sample": [r[0] for r in rows], "accessible": [r[3] for r in rows]}


def cmd_boundary(cfg: ExperimentConfig, mode: str | None = None, t_max: float = 10.0,
                 steps: int = 200):
    """Boundary data.

    Modes
    -----
    curves
        Single-generator trajectories (one per non-identity element) and the
        central line, as weights and polytope coordinates.
    projections
        Accessible B_3 samples projected on the even and odd planes.
    section-odd, section-even
        Classified cross-section through the centroid of B_3.

    Returns
    -------
    dict of name -> CSV text (or JSON-ready objects for ``--format json``).
    """
    rep = cfg.representation()
    is_b3 = rep.kind == "classical-permutation" and rep.dim == 3 and rep.order == 6
    if mode is None:
        mode = "projections" if is_b3 else "curves"
    if mode in ("projections", "section-odd", "section-even") and not is_b3:
        raise InvalidInput(f"mode {mode!r} needs the birkhoff3 group")
    if mode == "curves":
        t = rep.group
        if t.order < 2:
            raise InvalidInput("curves need a non-trivial group")
        grid = _time_grid(t_max, steps)
        pats = [[mu] for mu in range(1, t.order)] + [list(range(1, t.order))]
        curves = boundary_curves(t, pats, grid)
        poly = embed(rep)
        D = poly.affine_dim
        header = ["curve", "support", "t"] + [f"x{i}" for i in range(D)] + \
            [f"w_{i}" for i in range(t.order)]
        rows = []
        for k, c in enumerate(curves):
            sup = " ".join(map(str, c.support))
            for tt, w in c.samples:
                rows.append([k, sup, tt] + list(poly.point(w)) + list(w))
        if cfg.fmt == "json":
            return {"curves": {"header": header, "rows": [[_j(x) for x in r] for r in rows]}}
        return {"curves": _csv(header, rows)}
    if mode == "projections":
        n = cfg.samples
        sampler = PolytopeSampler(embed(rep))
        W = sampler.sample(n, make_rng(cfg.seed)).weights
        acc = AccessClassifier(rep, cfg.tol).classify(W)
        M = np.tensordot(W[acc], rep.matrices, axes=1)
        even, odd = b3_projections(M)
        if cfg.fmt == "json":
            return {"even": even.tolist(), "odd": odd.tolist()}
        return {"even": _csv(["x", "y"], even), "odd": _csv(["x", "y"], odd)}
    if mode in ("section-odd", "section-even"):
        plane = mode.split("-")[1]
        sec = b3_cross_sections(B3_CENTER, cfg.samples, cfg.seed, plane=plane, tol=cfg.tol)
        key = f"section_{plane}"
        if cfg.fmt == "json":
            return {key: {"coords": sec.coords.tolist(), "accessible": sec.accessible.astype(int).tolist(),
                          "n_drawn": sec.n_drawn}}
        return {key: sec.to_csv()}
    raise InvalidInput(f"unknown boundary mode {mode!r}")


def _j(x):
    return float(x) if isinstance(x, (float, np.floating)) else x


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("invalid_input", message)
        sys.exit(EXIT_INVALID)


def _emit_error(code, message):
    sys.stderr.write(json.dumps({"error": code, "message": str(message)}) + "\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--builtin", help="builtin group name, e.g. z3, pauli, weyl-3, birkhoff3")
    src.add_argument("--group-file", help="JSON group description")
    common.add_argument("-n", "--samples", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--format", dest="fmt", choices=["csv", "json"], default=None)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", help="output file (default stdout)")

    p = _Parser(prog="groupaccess", description="Accessible maps of finite groups of channels.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("group", parents=[common], help="group report")
    t = sub.add_parser("trajectory", parents=[common], help="weights along a trajectory")
    t.add_argument("--rates", help="comma list of g-1 (or g, first 0) rates; default uniform")
    t.add_argument("--t-max", type=float, default=5.0)
    t.add_argument("--steps", type=int, default=100)
    a = sub.add_parser("access", parents=[common], help="accessibility verdict")
    a.add_argument("--weights", help="comma list of mixture weights")
    a.add_argument("--matrix", help="matrix file (CSV or JSON)")
    a.add_argument("--regular", action="store_true",
                   help="test the weights in the regular representation")
    v = sub.add_parser("volume", parents=[common], help="Monte Carlo accessible fraction")
    v.add_argument("--method", choices=["auto", "triangulation", "hit-and-run"], default="auto")
    sub.add_parser("spectra", parents=[common], help="spectra of sampled mixtures")
    b = sub.add_parser("boundary", parents=[common], help="boundary curves and B_3 sections")
    b.add_argument("--mode", choices=["curves", "projections", "section-odd", "section-even"])
    b.add_argument("--t-max", type=float, default=10.0)
    b.add_argument("--steps", type=int, default=200)
    return p


DEFAULT_FORMAT = {"group": "json", "trajectory": "csv", "access": "json", "volume": "json",
                  "spectra": "csv", "boundary": "csv"}
DEFAULT_SAMPLES = {"volume": 100000, "spectra": 1000, "boundary": 10000}


def _write(out: str | None, text: str):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _render(result, fmt):
    if isinstance(result, str):
        return result
    return json.dumps(result, indent=None if fmt == "csv" else 2)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        fmt = args.fmt or DEFAULT_FORMAT[args.command]
        samples = args.samples if args.samples is not None else DEFAULT_SAMPLES.get(args.command, 1000)
        cfg = ExperimentConfig(args.builtin, args.group_file, samples, args.seed, args.tol,
                               fmt, args.workers, args.out)
        c = args.command
        if c == "group":
            res = cmd_group(cfg)
        elif c == "trajectory":
            res = cmd_trajectory(cfg, args.rates, args.t_max, args.steps)
        elif c == "access":
            res = cmd_access(cfg, args.weights, args.matrix, args.regular)
        elif c == "volume":
            res = cmd_volume(cfg, args.method)
        elif c == "spectra":
            res = cmd_spectra(cfg)
        else:
            res = cmd_boundary(cfg, args.mode, args.t_max, args.steps)
        if c == "boundary" and fmt == "csv":
            parts = list(res.items())
            if cfg.out is not None and len(parts) > 1:
                stem, ext = os.path.splitext(cfg.out)
                for key, text in parts:
                    _write(f"{stem}_{key}{ext or '.csv'}", text)
            elif len(parts) == 1:
                _write(cfg.out, parts[0][1])
            else:
                # several tables on one stream: each preceded by a "# name" line
                _write(cfg.out, "".join(f"# {key}\n{text}" for key, text in parts))
        else:
            _write(cfg.out, _render(res, "json"))
    except InvalidInput as exc:
        _emit_error(exc.code, exc)
        return EXIT_INVALID
    except NumericFailure as exc:
        _emit_error(exc.code, exc)
        return EXIT_NUMERIC
    except GroupAccessError as exc:
        _emit_error(exc.code, exc)
        return EXIT_INVALID
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
