"""``arcwidom`` command-line front end.

Exit codes: 0 PASS, 1 FAIL, 2 unsupported geometry, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import checks
from .conformal import MapError, UnsupportedGeometry, boundary_correspondence, map_arc_adaptive
from .extremal import _round17, widom_report
from .geometry import ArcError, ArcSpec, parse_arc_spec
from .potential import AdmissibilityError, equilibrium_data, parse_weight, symm_oracle, szego_data

log = logging.getLogger("arcwidom")

EXIT_PASS, EXIT_FAIL, EXIT_UNSUPPORTED, EXIT_BAD_INPUT = 0, 1, 2, 3


class BadInput(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    arc: Path | None
    weight: str | None
    nodes: int = 1024
    degrees: tuple[int, ...] = (10, 20, 40, 50, 60)
    tol: float = 1e-12
    lawson_tol: float = 1e-3
    fmt: str = "json"
    out: Path | None = None
    seed: int = 42

    def __post_init__(self):
        N = self.nodes
        if N < 256 or N > 16384 or N & (N - 1):
            raise BadInput(f"--nodes must be a power of two in [256, 16384], got {N}")
        if list(self.degrees) != sorted(set(self.degrees)) or (self.degrees and self.degrees[0] < 0):
            raise BadInput("degrees must be distinct, non-negative and sorted")
        if self.command == "widom" and self.degrees and self.degrees[-1] > N // 8:
            raise BadInput(f"max degree {self.degrees[-1]} exceeds N/8 = {N // 8}")
        if not 1e-14 <= self.tol <= 1e-6:
            raise BadInput("--tol must lie in [1e-14, 1e-6]")


def parse_degrees(text: str) -> tuple[int, ...]:
    """``"1-10,20,40"`` -> sorted degrees."""
    out: set[int] = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                lo, hi = (int(p) for p in part.split("-", 1))
                out.update(range(lo, hi + 1))
            else:
                out.add(int(part))
    except ValueError as exc:
        raise BadInput(f"bad degree list {text!r}") from exc
    return tuple(sorted(out))


def load_arc(path: Path | None) -> ArcSpec:
    if path is None:
        raise BadInput("--arc FILE.json is required")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise BadInput(f"cannot read {path}: {exc}") from exc
    return parse_arc_spec(text)


def _emit(cfg: RunConfig, payload: dict, csv_text: str | None, stem: str):
    if cfg.fmt == "json" or csv_text is None:
        text = json.dumps(_round17(payload), indent=2, sort_keys=True) + "\n"
        suffix = "json"
    else:
        text, suffix = csv_text, "csv"
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / f"{stem}.{suffix}").write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(cfg: RunConfig, name: str, header: str, rows) -> None:
    if cfg.out is None:
        return
    cfg.out.mkdir(parents=True, exist_ok=True)
    lines = [header] + [",".join(f"{v:.17g}" for v in row) for row in rows]
    (cfg.out / name).write_text("\n".join(lines) + "\n")


def _map(cfg: RunConfig, arc: ArcSpec):
    emap, M = map_arc_adaptive(arc, cfg.nodes, cfg.tol)
    if M != cfg.nodes:
        print(f"WARNING: under-resolution, the map needed {M} nodes", file=sys.stderr)
    return emap


def cmd_capacity(cfg: RunConfig) -> int:
    arc = load_arc(cfg.arc)
    emap = _map(cfg, arc)
    oracle = symm_oracle(arc).cap
    cap = emap.cap_original
    print(f"cap_conformal = {cap:.15g}")
    print(f"cap_oracle    = {oracle:.15g}")
    print(f"discrepancy   = {abs(cap - oracle):.3e}")
    t = np.cos(np.pi * (np.arange(256) + 0.5) / 256)
    bc = boundary_correspondence(emap, t)
    _write_csv(
        cfg,
        "boundary.csv",
        "t,theta_plus,theta_minus,gplus,gminus",
        zip(bc.t, bc.theta_plus, bc.theta_minus, bc.gplus, bc.gminus),
    )
    payload = {"cap_conformal": cap, "cap_oracle": oracle, "discrepancy": abs(cap - oracle)}
    if cfg.out is not None:
        _emit(cfg, payload, None, "capacity")
    return EXIT_PASS


def cmd_nu(cfg: RunConfig) -> int:
    arc = load_arc(cfg.arc)
    w = parse_weight(cfg.weight)
    emap = _map(cfg, arc)
    rep, sz, defect = checks.nu_verdict(emap, w, cfg.nodes)
    nu_eq = sz.nu_equilibrium
    passed = 1 < nu_eq <= 2 + 1e-6
    margin = min(nu_eq - 1, 2 - nu_eq)
    print(f"nu(mu_Gamma)    = {nu_eq:.12f}")
    print(f"nu(f mu_Gamma)  = {sz.nu:.12f}")
    print(f"S(f)            = {sz.S:.12f}")
    print(f"R(inf)          = {sz.R_inf:.12f}")
    print(f"symmetry_defect = {defect:.6e}")
    print(f"margin          = {margin:.6e}")
    print(f"nu at N, 2N     = {rep.nu:.12f}, {rep.nu_fine:.12f}")
    if rep.under_resolved:
        print(f"WARNING: under-resolved, N vs 2N discrepancy {rep.discrepancy:.2e}")
    print(f"1 < nu <= 2: {'PASS' if passed else 'FAIL'}")
    _write_csv(
        cfg,
        "equilibrium.csv",
        "z_re,z_im,omega,gplus,gminus",
        zip(sz.eq.z.real, sz.eq.z.imag, sz.eq.omega, sz.eq.gplus, sz.eq.gminus),
    )
    if cfg.out is not None:
        payload = sz.to_dict() | {"symmetry_defect": defect, "nu_fine": rep.nu_fine, "under_resolved": rep.under_resolved}
        _emit(cfg, payload, None, "nu")
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_widom(cfg: RunConfig) -> int:
    arc = load_arc(cfg.arc)
    rho = parse_weight(cfg.weight, sup_norm=True)
    f = parse_weight(cfg.weight)
    emap = _map(cfg, arc)
    eq = equilibrium_data(emap, cfg.nodes)
    report = widom_report(eq, cfg.degrees, rho=rho, f=f, tol=cfg.lawson_tol)
    _emit(cfg, report.to_dict(), report.to_csv(), "widom")
    if cfg.out is not None and cfg.fmt == "csv":
        (cfg.out / "widom.json").write_text(report.to_json() + "\n")
    for r in report.records:
        if not r.converged:
            print(f"WARNING: Lawson stagnation at n={r.n}, spread {r.spread:.2e}", file=sys.stderr)
    last = report.records[-1]
    b = report.bounds
    verdicts = {
        f"upp: W_inf,{last.n} <= upp + 0.05": last.Winf <= b.upp + 0.05,
        "upp2: upp <= 2 S(rho)": b.upp <= b.two_S + 1e-12,
        f"genel: |W2sq_{last.n} - nu(mu)| < 0.05": abs(last.W2sq - report.nu_limit) < 0.05,
    }
    for k, v in verdicts.items():
        print(f"{k}: {'PASS' if v else 'FAIL'}", file=sys.stderr if cfg.out is None else sys.stdout)
    return EXIT_PASS if all(verdicts.values()) else EXIT_FAIL


def cmd_verify(cfg: RunConfig) -> int:
    extra = {}
    if cfg.arc is not None:
        arc = load_arc(cfg.arc)
        _map(cfg, arc)  # unsupported geometry surfaces here
        extra[str(cfg.arc)] = arc
    ctx = checks.Context(nodes=cfg.nodes, seed=cfg.seed)
    results = checks.run_all(ctx, extra)
    for note in ctx.notes:
        print(f"WARNING: {note}")
    for r in results:
        print(r.line())
    failed = [r.criterion for r in results if not r.passed]
    print(f"overall: {'PASS' if not failed else 'FAIL (criteria ' + ', '.join(map(str, failed)) + ')'}")
    if cfg.out is not None:
        payload = {
            "nodes": cfg.nodes,
            "seed": cfg.seed,
            "checks": [{"criterion": r.criterion, "name": r.name, "passed": r.passed, "detail": r.detail} for r in results],
        }
        _emit(cfg, payload, None, "verify")
    return EXIT_FAIL if failed else EXIT_PASS


COMMANDS = {"capacity": cmd_capacity, "nu": cmd_nu, "widom": cmd_widom, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arcwidom", description="Capacities, Szegő quantities and Widom factors on Jordan arcs.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--arc", type=Path, help="arc description (JSON)")
    p.add_argument("--weight", help="weight, e.g. '2 * |z-(1,0)|^0.5'")
    p.add_argument("--nodes", type=int, default=1024, help="node count N (power of two)")
    p.add_argument("--degrees", default="10,20,40,50,60", help="degree list, e.g. '1-10,40'")
    p.add_argument("--tol", type=float, default=1e-12, help="conformal map tolerance")
    p.add_argument("--lawson-tol", type=float, default=1e-3, help="minimax spread target")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="json")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig(
            command=args.command,
            arc=args.arc,
            weight=args.weight,
            nodes=args.nodes,
            degrees=parse_degrees(args.degrees),
            tol=args.tol,
            lawson_tol=args.lawson_tol,
            fmt=args.fmt,
            out=args.out,
            seed=args.seed,
        )
        return COMMANDS[cfg.command](cfg)
    except (UnsupportedGeometry, MapError) as exc:
        print(f"UNSUPPORTED: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (BadInput, ArcError, AdmissibilityError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
