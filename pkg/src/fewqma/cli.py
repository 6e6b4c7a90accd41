"""Batch driver: claim sweeps, the reduction, spectra and majorization runs.

Every command produces a JSON report (schema 1) whose check records carry a
short anchor naming the mathematical fact being checked. Exit status is 0
when every check passes, 1 on a failed check or promise violation and 2 on
a configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import linalg, majorization, protocol, subspace, verifier
from .rng import make_rng, random_hermitian, random_subspace

SCHEMA = 1
MAX_DIM = 4096
PLUMBING = "plumbing"


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    k: int = 2
    m: int = 1
    K: int | None = None
    d: int = 2
    q: int = 3
    r: int = 8
    t: list[int] = field(default_factory=lambda: [2])
    seed: int = 1
    trials: int = 1
    kind: str = "both"
    sweep: bool = False
    max_K: int = 4
    vector_trials: int = 10
    verifier: str | None = None
    inject_fault: bool = False
    tol: float | None = None
    out: str | None = None
    format: str = "json"

    @property
    def local_dim(self) -> int:
        return self.K if self.K is not None else 2**self.k

    def validate(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ConfigError("--seed must be a 64-bit unsigned integer")
        if self.trials < 1:
            raise ConfigError("--trials must be at least 1")
        if self.k < 1 or self.m < 0:
            raise ConfigError("--k must be >= 1 and --m >= 0")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("--tol must be positive")
        if self.command == "claims":
            K = self.local_dim
            if self.sweep:
                if self.max_K**self.max_K > MAX_DIM:
                    raise ConfigError(f"--max-K {self.max_K} gives {self.max_K}^{self.max_K} > {MAX_DIM}")
                return
            for t in self.t:
                if t < 1 or K**max(t, self.d) > MAX_DIM:
                    raise ConfigError(f"K^max(t, d) = {K}^{max(t, self.d)} exceeds {MAX_DIM}; lower --t/--d/--K")
        if self.command in ("reduce", "spectrum", "gen"):
            if self.m < 1:
                raise ConfigError("planted verifiers need --m >= 1")
            if 2 ** (self.k + self.m) > MAX_DIM:
                raise ConfigError(f"2^(k+m) exceeds {MAX_DIM}")
            if self.q > 2**self.k:
                raise ConfigError(f"--q {self.q} exceeds the witness dimension 2^k = {2 ** self.k}")
            if self.kind in ("yes", "both") and not 1 <= self.d <= self.q:
                raise ConfigError(f"--d must satisfy 1 <= d <= q (got d={self.d}, q={self.q})")
            if self.r < 1:
                raise ConfigError("--r must be positive")
        if self.command == "reduce" and (2**self.k) ** self.q > MAX_DIM:
            raise ConfigError(f"(2^k)^q = {(2 ** self.k) ** self.q} exceeds {MAX_DIM}")
        if self.command == "spectrum":
            for t in self.t:
                if t < 1 or (2**self.k) ** t > MAX_DIM:
                    raise ConfigError(f"--t {t} out of range for k={self.k}")


@dataclass
class RunReport:
    command: str
    config: dict
    checks: list[dict] = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def check(self, name: str, anchor: str, value: float, tol: float | None, passed: bool, **extra):
        rec = {"name": name, "anchor": anchor or PLUMBING, "value": _num(value), "tol": tol, "pass": bool(passed)}
        rec.update({k: _num(v) for k, v in extra.items()})
        self.checks.append(rec)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "config": self.config,
            "summary": {
                "checks": len(self.checks),
                "failed": sum(not c["pass"] for c in self.checks),
                "passed": self.passed,
            },
            "checks": self.checks,
            "trace": self.trace,
            "data": self.data,
            "wall_time": self.wall_time,
        }


def _num(x):
    if isinstance(x, (np.floating, np.integer)):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _tol(cfg: ExperimentConfig, default: float) -> float:
    return cfg.tol if cfg.tol is not None else default


def _config_echo(cfg: ExperimentConfig) -> dict:
    echo = asdict(cfg)
    echo.pop("out", None)
    echo.pop("format", None)
    return echo


# ----------------------------------------------------------------------------- claims


def _claims_triples(cfg: ExperimentConfig):
    if cfg.sweep:
        for K in range(2, cfg.max_K + 1):
            for d in range(2, K + 1):
                for t in range(2, d + 1):
                    yield K, d, t
    else:
        for t in cfg.t:
            yield cfg.local_dim, cfg.d, t


def cmd_claims(cfg: ExperimentConfig) -> RunReport:
    rep = RunReport("claims", _config_echo(cfg))
    claim_tol = _tol(cfg, subspace.CLAIM_TOL)
    for K, d, t in _claims_triples(cfg):
        ctx = subspace.AltSymContext.build(t, K)
        res = ctx.trace_residuals()
        rep.check("alt_trace", "dim Alt(H^t) = C(K, t)", res["alt"], subspace.TRACE_TOL,
                  res["alt"] <= subspace.TRACE_TOL, K=K, t=t, trace=float(np.trace(ctx.antisym).real))
        rep.check("sym_trace", "dim Sym(H^t) = C(K+t-1, t)", res["sym"], subspace.TRACE_TOL,
                  res["sym"] <= subspace.TRACE_TOL, K=K, t=t, trace=float(np.trace(ctx.sym).real))
        if t == 2:
            split = linalg.frob(ctx.antisym + ctx.sym - np.eye(K * K))
            rep.check("alt_sym_split", "H^2 = Alt + Sym", split, 1e-12, split <= 1e-12, K=K)
        if not 2 <= t <= d <= K:
            continue
        override = None
        if cfg.inject_fault:
            override = np.array(subspace.antisymmetrizer(t, K))
            override[0, 0] += 1e-3
        for trial in range(cfg.trials):
            cr = subspace.verify_claims(d, t, K, cfg.seed, trial, alt_override=override)
            for c in cr.checks:
                tol, ok = c.tol, c.passed
                if cfg.tol is not None and c.name != "alt_wd_rank_one":
                    tol, ok = cfg.tol, c.value <= cfg.tol
                rep.check(c.name, c.anchor, c.value, tol, ok, K=K, d=d, t=t, trial=trial)

    # subspace identities used throughout: complement of intersection, tensor complement
    for trial in range(cfg.trials):
        rng = make_rng(cfg.seed, 0xFAC7, trial)
        s1, s2 = random_subspace(12, 8, rng), random_subspace(12, 7, rng)
        res = subspace.intersection_identity_residual(s1, s2)
        rep.check("intersection_complement", "(S1 ∩ S2)-perp = S1-perp + S2-perp", res, claim_tol,
                  res <= claim_tol, trial=trial)
        a, b = random_subspace(3, 2, rng), random_subspace(4, 2, rng)
        res = subspace.tensor_complement_residual(a, b)
        rep.check("tensor_complement", "(S1 ⊗ S2)-perp = S1-perp ⊗ H2 ⊕ S1 ⊗ S2-perp", res, claim_tol,
                  res <= claim_tol, trial=trial)
    return rep


# ----------------------------------------------------------------------------- reduce


def _kinds(cfg: ExperimentConfig):
    return ["yes", "no"] if cfg.kind == "both" else [cfg.kind]


def cmd_reduce(cfg: ExperimentConfig) -> RunReport:
    rep = RunReport("reduce", _config_echo(cfg))
    third = 1 / 3
    for trial in range(cfg.trials):
        for kind in _kinds(cfg):
            inst = verifier.make_instance(kind, cfg.k, cfg.m, cfg.d, cfg.q, cfg.r, cfg.seed, trial)
            result = protocol.algorithm_a(inst, cfg.q)
            expected = "accept" if kind == "yes" else "reject"
            rep.check("decision", "the reduction decides the planted kind", 0.0, None,
                      result.decision == expected, trial=trial, kind=kind, decision=result.decision)
            for e in result.trace:
                guaranteed = kind == "no" or e.t == inst.d
                rep.trace.append({
                    "trial": trial, "kind": kind, "t": e.t, "lambda1": e.lambda1, "lambda2": e.lambda2,
                    "verdict": e.verdict, "observational": not guaranteed,
                })
                if kind == "no":
                    rep.check("no_instance_rejected", "no instance gives a no query for every t",
                              e.lambda1, third, e.verdict == "no", trial=trial, t=e.t)
                elif e.t == inst.d:
                    rep.check("unique_witness_promise", "A^d has a unique accepted witness",
                              e.lambda2, third, e.verdict == "yes", trial=trial, t=e.t, lambda1=e.lambda1)
            if kind == "yes":
                uw = protocol.unique_witness_check(inst, seed=cfg.seed + trial)
                rep.check("slater_accepted", "A^d accepts the Slater witness w.p. >= 2/3",
                          uw.slater_acceptance, 2 / 3, uw.slater_acceptance >= 2 / 3, trial=trial)
                rep.check("perp_rejected", "A^d accepts states orthogonal to it w.p. <= 1/3",
                          uw.worst_perp_acceptance, third, uw.worst_perp_acceptance <= third, trial=trial)
                rep.check("top_eigvec_is_slater", "top eigenvector of G_d is the Slater state",
                          uw.top_overlap, 0.999, uw.top_overlap >= 0.999, trial=trial)
    return rep


# ----------------------------------------------------------------------------- spectrum


def cmd_spectrum(cfg: ExperimentConfig) -> RunReport:
    rep = RunReport("spectrum", _config_echo(cfg))
    declared = None
    if cfg.verifier:
        obj = _load_json(cfg.verifier)
        spec = verifier.VerifierSpec.from_json(obj)
        declared = (obj.get("meta") or {}).get("eigenvalues")
    else:
        kind = "yes" if cfg.kind == "both" else cfg.kind
        inst = verifier.make_instance(kind, cfg.k, cfg.m, cfg.d, cfg.q, cfg.r, cfg.seed)
        spec, declared = inst.spec, list(inst.profile.eigenvalues)
    tol = _tol(cfg, linalg.RECON_TOL)
    px = linalg.eigvalsh(verifier.pi_x(spec))
    ev = linalg.eigvalsh(verifier.acceptance_operator(spec))
    rep.data["pi_x"] = [float(x) for x in px]
    rep.data["acceptance_operator"] = [float(x) for x in ev]
    nonzero = px[: spec.witness_dim]
    diff = float(np.max(np.abs(nonzero - ev)))
    rep.check("compression_consistency", "nonzero spectrum of Pi_x equals spectrum of E", diff, tol, diff <= tol)
    tail = float(np.max(np.abs(px[spec.witness_dim:]))) if px.size > spec.witness_dim else 0.0
    rep.check("pi_x_rank", "Pi_x has at most 2^k nonzero eigenvalues", tail, tol, tail <= tol)
    if declared is not None:
        want = np.sort(np.asarray(declared, dtype=float))[::-1]
        err = float(np.max(np.abs(want - ev))) if want.size == ev.size else math.inf
        rep.check("declared_profile", "planted spectrum is recovered", err, tol, err <= tol)
    for t in cfg.t:
        if spec.witness_dim**t > MAX_DIM:
            raise ConfigError(f"--t {t} too large for k={spec.k}")
        g = protocol.combined_operator(spec, t)
        rep.data[f"G_{t}"] = [float(x) for x in g.eigenvalues()]
    return rep


# ----------------------------------------------------------------------------- horn


def cmd_horn(cfg: ExperimentConfig) -> RunReport:
    rep = RunReport("horn", _config_echo(cfg))
    tol = _tol(cfg, 1e-8)
    for trial in range(cfg.trials):
        rng = make_rng(cfg.seed, 0x4042, trial)
        n = int(rng.integers(4, 65))
        h = random_hermitian(n, rng)
        ok, slacks = majorization.check_majorization(majorization.MajorizationInput.from_matrix(h), tol)
        rep.check("eigenvalues_majorize_diagonal", "eigenvalues majorize the diagonal",
                  float(np.min(slacks)), tol, ok, trial=trial, dim=n, total_slack=float(slacks[-1]))
    q = min(cfg.q, 2**cfg.k)
    for trial in range(cfg.vector_trials):
        d = 1 + trial % q
        vi = majorization.make_vector_witness_instance(cfg.k, max(cfg.m, 1), d, q, cfg.seed, trial)
        b = majorization.vfqma_bounds(vi.mu, d, q, cfg.k)
        lam = linalg.eigvalsh(verifier.acceptance_operator(vi.instance.spec))
        lam_d = float(lam[d - 1])
        lam_next = float(lam[d]) if d < lam.size else 0.0
        rep.check("vector_bounds_certified", "basis diagonal certifies the eigenvalue gap",
                  b.lower, 2 / 3, b.certified, trial=trial, d=d, upper=b.upper)
        rep.check("lambda_d_lower", "lambda_d >= 2/3 under the vector shape",
                  lam_d, 2 / 3, lam_d >= 2 / 3 - tol and lam_d >= b.lower - tol, trial=trial, d=d, bound=b.lower)
        rep.check("lambda_next_upper", "lambda_(d+1) <= 1/3 under the vector shape",
                  lam_next, 1 / 3, lam_next <= 1 / 3 + tol and lam_next <= b.upper + tol, trial=trial, d=d,
                  bound=b.upper)
    return rep


# ----------------------------------------------------------------------------- gen


def cmd_gen(cfg: ExperimentConfig) -> RunReport:
    rep = RunReport("gen", _config_echo(cfg))
    kind = "yes" if cfg.kind == "both" else cfg.kind
    inst = verifier.make_instance(kind, cfg.k, cfg.m, cfg.d, cfg.q, cfg.r, cfg.seed)
    obj = inst.spec.to_json()
    obj["meta"] = {
        "kind": kind,
        "d": inst.d,
        "r": cfg.r,
        "seed": cfg.seed,
        "eigenvalues": [float(x) for x in inst.profile.eigenvalues],
    }
    rep.data["verifier"] = obj
    rep.check("unitary", PLUMBING, linalg.frob(inst.spec.v.conj().T @ inst.spec.v - np.eye(inst.spec.dim)),
              linalg.STRUCT_TOL, linalg.is_unitary(inst.spec.v))
    return rep


COMMANDS = {
    "claims": cmd_claims,
    "reduce": cmd_reduce,
    "spectrum": cmd_spectrum,
    "horn": cmd_horn,
    "gen": cmd_gen,
}


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def run(cfg: ExperimentConfig) -> RunReport:
    cfg.validate()
    start = time.perf_counter()
    rep = COMMANDS[cfg.command](cfg)
    rep.wall_time = round(time.perf_counter() - start, 6)
    return rep


def render_json(rep: RunReport) -> str:
    return json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n"


def render_csv(rep: RunReport) -> str:
    rows = [{"section": "check", **c} for c in rep.checks]
    rows += [{"section": "trace", **t} for t in rep.trace]
    cols: list[str] = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fewqma", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=1, help="master 64-bit seed")
        p.add_argument("--trials", type=int, default=1)
        p.add_argument("--tol", type=float, default=None, help="override the residual tolerance")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=["json", "csv"], default="json")

    def instance(p):
        p.add_argument("--k", type=int, default=2, help="witness qubits")
        p.add_argument("--m", type=int, default=1, help="auxiliary qubits")
        p.add_argument("--d", type=int, default=2, help="planted witness dimension")
        p.add_argument("--q", type=int, default=3, help="witness dimension bound")
        p.add_argument("--r", type=int, default=8, help="amplification exponent")
        p.add_argument("--kind", choices=["yes", "no", "both"], default="both")

    p = sub.add_parser("claims", help="subspace identity sweeps")
    common(p)
    p.add_argument("--k", type=int, default=2, help="qubits per register (K = 2^k unless --K)")
    p.add_argument("--K", type=int, default=None, help="local dimension")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--t", type=_int_list, default=[2], help="register counts, comma separated")
    p.add_argument("--sweep", action="store_true", help="all 2 <= t <= d <= K <= --max-K")
    p.add_argument("--max-K", dest="max_K", type=int, default=4)
    p.add_argument("--inject-fault", action="store_true", help="corrupt the projector (negative control)")

    p = sub.add_parser("reduce", help="run the reduction on planted instances")
    common(p)
    instance(p)

    p = sub.add_parser("spectrum", help="spectra of Pi_x, E and G_t")
    common(p)
    instance(p)
    p.add_argument("--t", type=_int_list, default=[1, 2])
    p.add_argument("--verifier", default=None, help="verifier JSON file")

    p = sub.add_parser("horn", help="majorization and vector-basis bound suites")
    common(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--vector-trials", dest="vector_trials", type=int, default=10)

    p = sub.add_parser("gen", help="write a planted verifier file")
    common(p)
    instance(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = ExperimentConfig(**vars(args))
    try:
        rep = run(cfg)
    except (ConfigError, verifier.VerifierError) as exc:
        print(f"fewqma {cfg.command}: {exc}", file=sys.stderr)
        return 2
    if cfg.command == "gen":
        text = json.dumps(rep.data["verifier"]) + "\n"
    else:
        text = render_csv(rep) if cfg.format == "csv" else render_json(rep)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
