"""Command-line entry point: ``python -m mcbop <subcommand> ...``.

Exit status is 0 when every check passed, 1 when some check failed or a
computation hit a singular quantity, and 2 for usage and input errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import __version__
from .cbop import (check_annihilation, check_orthogonality, check_qd_route, check_structure,
                   check_symmetry_lemma, check_xshift, family_from_measure)
from .errors import ConfigError, McbopError, MeasureParseError, TruncationTooSmall
from .kernels import BACKEND
from .lattice import check_evolution, check_lax, check_nc_ctoda, check_recurrence, recurrence
from .measure import is_quadrature, measure_from_dict, moment_condition_check, moments
from .qdid import GROUPS, IDENTITIES, run_identities
from .reduction import check_bridge, check_hirota, tau_sigma
from .report import ResidualReport
from .ring import RR
from .t3 import check_t3

SCHEMA = 1
LATTICE_CHECKS = ("recurrence", "evolution", "nctoda", "lax", "t3")


@dataclass
class RunConfig:
    command: str
    measure: Optional[str] = None
    backend: str = "exact"
    n_max: Optional[int] = None
    order: Optional[int] = None
    lax_band: int = 6
    checks: tuple = ()
    which: str = "all"
    trials: int = 100
    p: Optional[int] = None
    seed: int = 0
    m_max: int = 2
    report: Optional[str] = None
    csv: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        out = asdict(self)
        out["checks"] = list(self.checks)
        out.pop("extra")
        return {k: v for k, v in out.items() if v is not None}


class Run:
    """Accumulates suites, data tables and CSV rows for one invocation."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.suites = []
        self.identity_reports = []
        self.data = {}
        self.csv_rows = []
        self.csv_header = None
        self.notes = []

    def add(self, rep: ResidualReport):
        self.suites.append(rep)
        return rep

    def skip(self, title: str, why: str):
        rep = ResidualReport(title)
        rep.skip(title, None, why)
        self.suites.append(rep)

    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "skipped": 0}
        for rep in self.suites:
            for k, v in rep.counts().items():
                out[k] += v
        for r in self.identity_reports:
            out["pass" if r.ok else "fail"] += 1
        return out

    @property
    def ok(self) -> bool:
        return self.counts()["fail"] == 0

    def to_json(self, elapsed: float) -> dict:
        counts = self.counts()
        out = {
            "schema": SCHEMA,
            "tool": "mcbop",
            "version": __version__,
            "config": self.config.echo(),
            "checks": [rep.to_json() for rep in self.suites],
            "summary": dict(counts, status="pass" if counts["fail"] == 0 else "fail"),
            "timing": {"seconds": round(elapsed, 6), "kernels": BACKEND},
        }
        if self.identity_reports:
            out["identities"] = [r.to_json() for r in self.identity_reports]
        if self.data:
            out["data"] = self.data
        if self.notes:
            out["notes"] = self.notes
        return out


# -- measure handling ---------------------------------------------------------

def _load(config: RunConfig):
    if not config.measure:
        raise ConfigError(f"{config.command}: --measure is required")
    try:
        with open(config.measure) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read measure file {config.measure!r}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeasureParseError(f"{config.measure}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if config.backend == "exact" and is_quadrature(data):
        raise ConfigError("the exact backend cannot use a quadrature (float) measure; pass --backend f64")
    mu = measure_from_dict(data)
    if config.backend == "f64" and mu.base is not RR:
        mu = mu.to_base(RR)
    return mu


def _family(mu, n_max, flow="keep"):
    if flow != "keep":
        mu = mu.with_flow(flow)
    return family_from_measure(mu, n_max)


def _mat_json(m):
    return m.to_json()


def _scalar_cell(m):
    """Plot-friendly scalar: ``(0,0)`` entry value part as a string."""
    v = m.value[0, 0] if m.ring.is_jet else m[0, 0]
    return str(v)


# -- subcommands ----------------------------------------------------------------

def cmd_moments(run: Run, mu):
    order = run.config.order if run.config.order is not None else (run.config.n_max or len(mu.nodes)) + 2
    T = moments(mu, order)
    run.data["moments"] = {
        "order": order,
        "m": [[_mat_json(x) for x in row] for row in T.m],
        "phi": [_mat_json(x) for x in T.phi],
    }
    run.data["moment_condition"] = moment_condition_check(T)
    run.csv_header = ["n", "phi_n", "m_nn"]
    run.csv_rows = [[n, _scalar_cell(T.phi[n]), _scalar_cell(T.m[n][n])] for n in range(order + 1)]


def _family_data(F):
    top = F.n_max
    return {
        "status": F.status,
        "valid_through": F.valid_through,
        "H": [_mat_json(F.H[n]) for n in range(top + 1)],
        "V": [_mat_json(F.V[n]) for n in range(top + 1)],
        "xi_sub": [_mat_json(F.sub(n + 1)) for n in range(min(top, F.top - 1) + 1)],
    }


def cmd_polys(run: Run, mu):
    F = _family(mu, run.config.n_max)
    run.data["family"] = _family_data(F)
    run.add(check_orthogonality(F))
    run.add(check_annihilation(F))
    run.add(check_qd_route(F, sample_x=mu.nodes[0][0]))
    if mu.symmetric:
        run.add(check_structure(F))
    run.add(check_symmetry_lemma(F))
    run.add(check_xshift(F))
    run.csv_header = ["n", "H_n", "V_n"]
    run.csv_rows = [[n, _scalar_cell(F.H[n]), _scalar_cell(F.V[n])] for n in range(F.n_max + 1)]
    return F


def cmd_recurrence(run: Run, mu, F=None):
    F = F or _family(mu, run.config.n_max)
    R = recurrence(F)
    run.data["recurrence"] = {
        "status": R.status,
        "a": [_mat_json(x) for x in R.a],
        "b": [_mat_json(x) for x in R.b],
        "c": [_mat_json(x) for x in R.c],
        "d": [_mat_json(x) for x in R.d],
    }
    run.add(check_recurrence(F, R))
    run.csv_header = ["n", "a_n", "b_n", "c_n", "d_n"]
    run.csv_rows = [
        [n, _scalar_cell(R.a[n])] + ([_scalar_cell(R.b[n]), _scalar_cell(R.c[n]), _scalar_cell(R.d[n])] if n < len(R.b) else ["", "", ""])
        for n in range(len(R.a))
    ]
    return F, R


def _lax(run: Run, mu):
    T = run.config.lax_band
    if T < 5:
        raise ConfigError(f"--lax-band must be at least 5 (got {T})")
    need = T - 1
    F = _family(mu, need, "t1")
    if F.n_max < need:
        run.skip("Lax pair", f"band T={T} needs the family through n={need}; measure supports n<={F.n_max}")
        return
    try:
        run.add(check_lax(F, recurrence(F), T))
    except (TruncationTooSmall, ValueError) as exc:
        run.skip("Lax pair", str(exc))


def cmd_lattice(run: Run, mu):
    checks = run.config.checks or LATTICE_CHECKS
    F = _family(mu, run.config.n_max, "t1")
    R = None
    if any(c in checks for c in ("recurrence", "evolution", "nctoda")):
        R = recurrence(F)
    if "recurrence" in checks:
        run.add(check_recurrence(F, R))
    if "evolution" in checks:
        run.add(check_evolution(F, R))
    if "nctoda" in checks:
        run.add(check_nc_ctoda(F, R))
    if "lax" in checks:
        _lax(run, mu)
    if "t3" in checks:
        _t3(run, mu)
    run.data["family"] = _family_data(F)


def cmd_lax(run: Run, mu):
    _lax(run, mu)


def _t3(run: Run, mu):
    if not mu.symmetric:
        run.skip("t3 flow", "t3 construction needs symmetric weights")
        return
    m_max = run.config.m_max
    n_top = run.config.n_max if run.config.n_max is not None else 2
    F = _family(mu, max(m_max, n_top + 1), "t3")
    if F.top < 2:
        run.skip("t3 flow", f"needs polynomials through degree 2; family stops at {F.top}")
        return
    run.add(check_t3(F, m_max, n_top))


def cmd_t3(run: Run, mu):
    _t3(run, mu)


def cmd_reduce(run: Run, mu):
    if mu.p != 1:
        raise ConfigError("reduce needs a scalar (p = 1) measure")
    F = _family(mu, run.config.n_max, "t1")
    D = tau_sigma(F.table)
    top = F.n_max
    run.add(check_hirota(D, top))
    run.add(check_bridge(D, F))
    ring = D.ring
    run.data["tau"] = [ring.to_json(t) for t in D.tau[: top + 2]]
    run.data["sigma"] = [ring.to_json(s) for s in D.sigma[: top + 2]]
    run.csv_header = ["n", "tau_n", "sigma_n"]
    run.csv_rows = [[n, str(D.tau[n].c0), str(D.sigma[n].c0)] for n in range(top + 2)]


def cmd_identities(run: Run, mu=None):
    c = run.config
    if c.backend != "exact":
        raise ConfigError("identity checks run over exact rationals only")
    ps = [c.p] if c.p else [1, 2, 3]
    for p in ps:
        run.identity_reports.extend(run_identities(c.which, c.trials, p, c.seed))


def cmd_verify(run: Run, mu):
    checks = set(run.config.checks or ("all",))
    every = "all" in checks
    F = None
    if every or "polys" in checks:
        F = cmd_polys(run, mu)
    if every or "recurrence" in checks:
        cmd_recurrence(run, mu, F)
    lattice = [c for c in LATTICE_CHECKS if c != "recurrence" and (every or c in checks)]
    if lattice:
        sub = RunConfig(**{**asdict(run.config), "checks": tuple(lattice)})
        inner = Run(sub)
        cmd_lattice(inner, mu)
        run.suites.extend(inner.suites)
    if (every or "reduce" in checks) and mu.p == 1:
        cmd_reduce(run, mu)
    elif every and mu.p != 1:
        run.skip("tau bridge", "commutative reduction needs p = 1")
    if "identities" in checks:
        sub = RunConfig(**{**asdict(run.config), "p": mu.p})
        inner = Run(sub)
        cmd_identities(inner)
        run.identity_reports.extend(inner.identity_reports)
    run.csv_header, run.csv_rows = None, []


COMMANDS = {
    "moments": cmd_moments,
    "polys": cmd_polys,
    "recurrence": cmd_recurrence,
    "lattice": cmd_lattice,
    "lax": cmd_lax,
    "identities": cmd_identities,
    "reduce": cmd_reduce,
    "t3": cmd_t3,
    "verify": cmd_verify,
}


def run(config: RunConfig) -> dict:
    """Execute one configuration and return the report dictionary."""
    if config.n_max is not None and config.n_max < 1:
        raise ConfigError("--n-max must be at least 1")
    t0 = time.perf_counter()
    state = Run(config)
    mu = None if config.command == "identities" else _load(config)
    COMMANDS[config.command](state, mu)
    report = state.to_json(time.perf_counter() - t0)
    if config.report:
        with open(config.report, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if config.csv and state.csv_header:
        with open(config.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(state.csv_header)
            w.writerows(state.csv_rows)
    return report


def _checks(text: str) -> tuple:
    return tuple(c.strip() for c in text.split(",") if c.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcbop", description="Exact verification of matrix Cauchy bi-orthogonal polynomials.")
    parser.add_argument("--version", action="version", version=f"mcbop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, measure=True):
        if measure:
            p.add_argument("--measure", help="measure JSON file")
            p.add_argument("--backend", choices=("exact", "f64"), default="exact")
            p.add_argument("--n-max", type=int, dest="n_max")
        p.add_argument("--report", help="write the JSON report here")
        p.add_argument("--csv", help="write a per-n CSV series here")
        p.add_argument("--quiet", action="store_true", help="print only the summary line")

    p = sub.add_parser("moments", help="moment table and moment condition")
    common(p)
    p.add_argument("--order", type=int)
    common_cmds = {
        "polys": "polynomial family with orthogonality checks",
        "recurrence": "four-term recurrence coefficients",
    }
    for name, text in common_cmds.items():
        common(sub.add_parser(name, help=text))
    p = sub.add_parser("lattice", help="recurrence, evolution, lattice, Lax and t3 checks")
    common(p)
    p.add_argument("--checks", type=_checks, default=LATTICE_CHECKS, help="comma list of " + ",".join(LATTICE_CHECKS) + " or all")
    p.add_argument("--lax-band", type=int, default=6, dest="lax_band")
    p.add_argument("--m-max", type=int, default=2, dest="m_max")
    p = sub.add_parser("lax", help="Lax compatibility on a T-block truncation")
    common(p)
    p.add_argument("--lax-band", type=int, default=6, dest="lax_band")
    p = sub.add_parser("identities", help="randomized quasideterminant identities")
    common(p, measure=False)
    p.add_argument("--which", default="all", choices=tuple(dict.fromkeys(("all",) + tuple(GROUPS) + IDENTITIES)))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--p", type=int, choices=(1, 2, 3))
    p.add_argument("--seed", type=int, default=0)
    common(sub.add_parser("reduce", help="tau/sigma determinants and the bilinear equations"))
    p = sub.add_parser("t3", help="t3 flow: annihilating test functions and wave evolution")
    common(p)
    p.add_argument("--m-max", type=int, default=2, dest="m_max")
    p = sub.add_parser("verify", help="run every applicable suite")
    common(p)
    p.add_argument("--checks", type=_checks, default=("all",))
    p.add_argument("--lax-band", type=int, default=6, dest="lax_band")
    p.add_argument("--m-max", type=int, default=2, dest="m_max")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config(ns) -> RunConfig:
    d = vars(ns).copy()
    d.pop("quiet", None)
    checks = d.pop("checks", ())
    if checks and "all" in checks:
        checks = LATTICE_CHECKS if ns.command == "lattice" else ("all",)
    if ns.command == "lattice":
        bad = [c for c in checks if c not in LATTICE_CHECKS]
        if bad:
            raise ConfigError(f"unknown lattice checks: {', '.join(bad)}")
    fields = RunConfig.__dataclass_fields__
    cfg = RunConfig(**{k: v for k, v in d.items() if k in fields}, checks=tuple(checks))
    return cfg


def _print(report: dict, quiet: bool):
    if not quiet:
        for suite in report["checks"]:
            c = suite["counts"]
            print(f"{suite['title']:<42} pass={c['pass']:<4} fail={c['fail']:<4} skipped={c['skipped']}")
            for e in suite["entries"]:
                if e["status"] == "fail":
                    print(f"  FAIL {e['identity']} n={e['n']} residual={e.get('residual')}")
                elif e["status"] == "skipped":
                    print(f"  skipped {e['identity']}: {e.get('detail', '')}")
        for r in report.get("identities", []):
            print(f"identity {r['identity']:<10} p={r['p']} trials={r['trials']:<4} failures={r['failures']} resampled={r['resampled']}")
    s = report["summary"]
    print(f"{s['status'].upper()}: {s['pass']} passed, {s['fail']} failed, {s['skipped']} skipped")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = run(_config(ns))
    except (ConfigError, MeasureParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except McbopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _print(report, ns.quiet)
    return 0 if report["summary"]["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
