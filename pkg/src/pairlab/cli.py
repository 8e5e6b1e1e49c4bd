"""Command line interface: ``pairlab <command> ...``.

Exit codes: 0 when the check passes or the answer is yes, 1 when it fails or
the answer is no, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import construction, lemma, pairs, similarity, theorem
from .field import is_prime
from .linalg import Mat, MatrixFormatError, format_matrix, parse_matrix
from .pairs import BivarPoly, MatPair, QuadCoeffs

SCHEMA = 1
MAX_ENUMERATED_MATRICES = 100_000


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    p: Optional[int] = None
    n: int = 1
    trials: int = 10
    seed: int = 0
    mode: str = "random"
    budget: int = similarity.DEFAULT_BUDGET
    max_q: int = 5000
    probe: int = 0
    json: bool = False
    timing: bool = False
    out: Optional[Path] = None
    inputs: list[Path] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.p is not None and not is_prime(self.p):
            raise UsageError(f"--field must be prime, got {self.p}")
        if self.n < 1:
            raise UsageError("--n must be at least 1")
        if self.trials < 0:
            raise UsageError("--trials must be non-negative")
        if self.budget < 1:
            raise UsageError("--budget must be positive")


# ----------------------------------------------------------------------------
# file formats


def parse_matrix_file(path) -> Mat:
    return parse_matrix(Path(path).read_text())


def write_matrix_file(A: Mat, path) -> None:
    Path(path).write_text(format_matrix(A))


def parse_matrices(text: str) -> list[Mat]:
    """Consecutive matrices in the text format, each introduced by its header."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    out, k = [], 0
    while k < len(lines):
        head = lines[k].split()
        if len(head) != 3:
            raise MatrixFormatError(f"expected a 'rows cols p' header, got {lines[k]!r}")
        rows = int(head[0])
        out.append(parse_matrix("\n".join(lines[k: k + 1 + rows])))
        k += 1 + rows
    return out


def parse_pair_file(path) -> MatPair:
    mats = parse_matrices(Path(path).read_text())
    if len(mats) != 2:
        raise MatrixFormatError(f"{path}: a pair file holds exactly two matrices, found {len(mats)}")
    return MatPair(*mats)


def format_pair(P: MatPair) -> str:
    return format_matrix(P.A) + format_matrix(P.B)


def _mat_json(M: Optional[Mat]):
    return None if M is None else M.tolist()


def _base_json(b: construction.BasePair) -> dict:
    return {"M": b.M.tolist(), "N": b.N.tolist()}


# ----------------------------------------------------------------------------
# reporting


class Reporter:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.lines: list[str] = []

    def record(self, human: str, **data) -> None:
        if self.cfg.json:
            self.lines.append(json.dumps({"schema": SCHEMA, "command": self.cfg.command, **data},
                                         sort_keys=True))
        else:
            self.lines.append(human)

    def text(self, body: str) -> None:
        self.lines.append(body.rstrip("\n"))

    def flush(self) -> None:
        body = "\n".join(self.lines) + ("\n" if self.lines else "")
        if self.cfg.out:
            Path(self.cfg.out).write_text(body)
        else:
            sys.stdout.write(body)


def _workers() -> int:
    env = os.environ.get("PAIRLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"PAIRLAB_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _map_ordered(fn, jobs: list):
    workers = min(_workers(), len(jobs))
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _rng(seed: int, k: int) -> np.random.Generator:
    return np.random.default_rng([seed, k])


def _verdict_json(v: similarity.SimilarityVerdict) -> dict:
    return {"outcome": v.outcome, "reason": v.reason, "failure_bound": v.failure_bound,
            "witness": _mat_json(v.witness)}


# ----------------------------------------------------------------------------
# commands


def cmd_build_p0(cfg: RunConfig, rep: Reporter) -> int:
    base = _base_from_inputs(cfg)
    rep.text(format_pair(construction.build_P0(base).pair))
    return 0


def cmd_build_e1(cfg: RunConfig, rep: Reporter) -> int:
    base = _base_from_inputs(cfg)
    rep.text(format_pair(construction.build_E1_pair(base)))
    return 0


def _base_from_inputs(cfg: RunConfig) -> construction.BasePair:
    if len(cfg.inputs) == 1:
        P = parse_pair_file(cfg.inputs[0])
        return construction.BasePair(P.A, P.B)
    if len(cfg.inputs) == 2:
        return construction.BasePair(parse_matrix_file(cfg.inputs[0]), parse_matrix_file(cfg.inputs[1]))
    raise UsageError("give either one pair file or two matrix files (M then N)")


def cmd_check_n23(cfg: RunConfig, rep: Reporter) -> int:
    P = parse_pair_file(cfg.inputs[0])
    ok = pairs.check_n23(P)
    rep.record(f"N23 membership: {'yes' if ok else 'no'}", n23=ok, size=P.n, p=P.p)
    return 0 if ok else 1


def cmd_poly_apply(cfg: RunConfig, rep: Reporter) -> int:
    P = parse_pair_file(cfg.inputs[0])
    x = cfg.extra
    if x.get("quad"):
        vals = [int(t) for t in x["quad"].split(",")]
        if len(vals) != 7:
            raise UsageError("--quad takes alpha,beta,gamma,alpha1,alpha2,beta1,beta2")
        try:
            q = QuadCoeffs.make(P.p, *vals)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        f, g = pairs.quad_to_polys(q)
    elif x.get("f") and x.get("g"):
        f = BivarPoly.from_text(Path(x["f"]).read_text(), P.p)
        g = BivarPoly.from_text(Path(x["g"]).read_text(), P.p)
    else:
        raise UsageError("poly-apply needs --quad or both --f and --g")
    if not pairs.check_admissible(f, g):
        print("error: substitution is not admissible (constant term or singular Jacobian)", file=sys.stderr)
        return 1
    rep.text(format_pair(MatPair(pairs.eval_poly_pair(f, P), pairs.eval_poly_pair(g, P))))
    return 0


def cmd_similar(cfg: RunConfig, rep: Reporter) -> int:
    P1, P2 = (parse_pair_file(p) for p in cfg.inputs)
    v = similarity.are_similar_pairs(P1, P2, cfg.budget, cfg.seed)
    rep.record(f"{v.outcome} ({v.reason})" + (f"\nwitness:\n{format_matrix(v.witness)}" if v.witness else ""),
               **_verdict_json(v))
    return 0 if v.similar else 1


def cmd_poly_similar(cfg: RunConfig, rep: Reporter) -> int:
    P1, P2 = (parse_pair_file(p) for p in cfg.inputs)
    try:
        res = similarity.are_poly_similar(P1, P2, cfg.budget, cfg.seed)
    except pairs.NotInN23Error as exc:
        raise UsageError(str(exc)) from None
    label = {True: "poly-similar", False: "not poly-similar", None: "undecided"}[res.similar]
    human = f"{label} (certified={res.certified}, checked {res.checked} substitutions)"
    if res.coeffs is not None:
        human += f"\nsubstitution: {res.coeffs.as_dict()}\nwitness:\n{format_matrix(res.witness)}"
    rep.record(human, poly_similar=res.similar, certified=res.certified, checked=res.checked,
               coeffs=res.coeffs.as_dict() if res.coeffs else None, witness=_mat_json(res.witness))
    return 0 if res.similar else 1


def _random_quad(p: int, rng: np.random.Generator) -> QuadCoeffs:
    a, b = rng.integers(1, p, size=2)
    rest = rng.integers(0, p, size=5)
    return QuadCoeffs.make(p, alpha=a, beta=b, gamma=rest[0], alpha1=rest[1], alpha2=rest[2],
                           beta1=rest[3], beta2=rest[4])


def cmd_verify_lemma1(cfg: RunConfig, rep: Reporter) -> int:
    p = _need_field(cfg)
    failed = 0
    for k in range(cfg.trials):
        rng = _rng(cfg.seed, k)
        base = construction.BasePair(Mat(rng.integers(0, p, (cfg.n, cfg.n)), p),
                                     Mat(rng.integers(0, p, (cfg.n, cfg.n)), p))
        q = _random_quad(p, rng)
        ok, trace = lemma.verify_lemma1(base, q)
        failed += not ok
        rep.record(f"trial {k}: {'pass' if ok else 'FAIL ' + '; '.join(trace.failures)}",
                   trial=k, status="pass" if ok else "fail", coeffs=q.as_dict(),
                   base=_base_json(base), failures=trace.failures)
    rep.record(f"verify-lemma1: {cfg.trials - failed}/{cfg.trials} passed",
               record="summary", passed=cfg.trials - failed, failed=failed)
    return 0 if failed == 0 else 1


def _need_field(cfg: RunConfig) -> int:
    if cfg.p is None:
        raise UsageError(f"{cfg.command} needs --field")
    return cfg.p


def _enumerated_bases(p: int, n: int) -> list[construction.BasePair]:
    if p ** (n * n) > MAX_ENUMERATED_MATRICES:
        raise UsageError(f"exhaustive mode enumerates {p}^{n * n} matrices; use --mode random")
    unip = theorem.all_unipotent(n, p)
    return [construction.BasePair(M, N) for M in unip for N in unip]


def _theorem_instances(cfg: RunConfig) -> list[tuple]:
    p, n = cfg.p, cfg.n
    if cfg.mode == "exhaustive":
        bases = _enumerated_bases(p, n)
        jobs = [(i, j) for i in range(len(bases)) for j in range(i, len(bases))]
        if cfg.trials:
            jobs = jobs[: cfg.trials]
        return [("pair", k, bases[i], bases[j], None) for k, (i, j) in enumerate(jobs)]
    out = []
    for k in range(cfg.trials):
        rng = _rng(cfg.seed, k)
        b1 = theorem.random_e1_base(n, p, rng)
        if k % 2 == 0:
            X = theorem.random_invertible(n, p, rng)
            out.append(("pair", k, b1, b1.conjugate(X), X))
        else:
            out.append(("pair", k, b1, theorem.random_e1_base(n, p, rng), None))
    return out


def _quad_family(cfg: RunConfig, rng: np.random.Generator):
    p = cfg.p
    if pairs.quad_count(p) <= cfg.max_q:
        return None
    sample = [QuadCoeffs.identity(p)] + [_random_quad(p, rng) for _ in range(cfg.max_q - 1)]
    return sample


def _theorem_job(args) -> dict:
    cfg, (_, k, b1, b2, X) = args
    rng = _rng(cfg.seed, 10_000 + k)
    start = time.perf_counter()
    inst = theorem.TheoremInstance(b1, b2)
    family = _quad_family(cfg, rng)
    probe = theorem.scalar_law_probe(cfg.p, rng, cfg.probe) if cfg.probe else ()
    try:
        rep = theorem.verify_converse(inst, cfg.budget, cfg.seed, coeffs=family, probe=probe)
    except (theorem.TheoremViolation, theorem.ProofShapeError) as exc:
        return {"instance": k, "status": "violation", "error": str(exc),
                "base1": _base_json(b1), "base2": _base_json(b2)}
    forward = theorem.verify_forward(inst, X, cfg.budget, cfg.seed) if X is not None else None
    rec = {
        "instance": k,
        "status": "pass" if forward is not False else "fail",
        "base1": _base_json(b1),
        "base2": _base_json(b2),
        "base_similar": rep.base_similar,
        "poly_similar": rep.poly_similar,
        "certified": rep.certified,
        "q_exhaustive": family is None,
        "checked": rep.checked,
        "witness": rep.coeffs.as_dict() if rep.coeffs else None,
        "witnesses": [w.coeffs.as_dict() for w in rep.witnesses],
        "scalar_law": rep.scalar_law,
        "recovered_X": rep.witnesses[0].recovered.tolist() if rep.witnesses else None,
        "forward": forward,
    }
    if cfg.timing:
        rec["seconds"] = round(time.perf_counter() - start, 3)
    return rec


def cmd_verify_theorem(cfg: RunConfig, rep: Reporter) -> int:
    _need_field(cfg)
    jobs = _theorem_instances(cfg)
    results = _map_ordered(_theorem_job, [(cfg, j) for j in jobs])
    bad = 0
    for rec in results:
        if rec["status"] == "violation":
            # the theorem is proved, so a violation is a bug: stop with the trace
            print(json.dumps(rec, sort_keys=True), file=sys.stderr)
            rep.flush()
            raise SystemExit(1)
        bad += rec["status"] != "pass"
        human = (f"instance {rec['instance']}: base_similar={rec['base_similar']} "
                 f"poly_similar={rec['poly_similar']} certified={rec['certified']} "
                 f"witness={rec['witness']} scalar_law={rec['scalar_law']} {rec['status']}")
        rep.record(human, **rec)
    rep.record(f"verify-theorem: {len(results) - bad}/{len(results)} instances consistent",
               record="summary", passed=len(results) - bad, failed=bad)
    return 0 if bad == 0 else 1


def _e1_job(args) -> dict:
    cfg, k = args
    rng = _rng(cfg.seed, k)
    b1 = theorem.random_e1_base(cfg.n, cfg.p, rng)
    b2 = b1.conjugate(theorem.random_invertible(cfg.n, cfg.p, rng)) if k % 2 == 0 else \
        theorem.random_e1_base(cfg.n, cfg.p, rng)
    try:
        r = theorem.verify_e1_wildness(b1, b2, cfg.budget, cfg.seed)
    except theorem.TheoremViolation as exc:
        return {"instance": k, "status": "violation", "error": str(exc),
                "base1": _base_json(b1), "base2": _base_json(b2)}
    ok = r.consistent and r.certified
    return {"instance": k, "status": "pass" if ok else "fail", "base1": _base_json(b1),
            "base2": _base_json(b2), "base": r.base.outcome, "e1": r.e1.outcome}


def cmd_verify_e1(cfg: RunConfig, rep: Reporter) -> int:
    _need_field(cfg)
    results = _map_ordered(_e1_job, [(cfg, k) for k in range(cfg.trials)])
    bad = 0
    for rec in results:
        if rec["status"] == "violation":
            print(json.dumps(rec, sort_keys=True), file=sys.stderr)
            rep.flush()
            raise SystemExit(1)
        bad += rec["status"] != "pass"
        rep.record(f"instance {rec['instance']}: bases {rec['base']}, unitriangular pairs {rec['e1']} "
                   f"{rec['status']}", **rec)
    rep.record(f"verify-e1: {len(results) - bad}/{len(results)} instances consistent",
               record="summary", passed=len(results) - bad, failed=bad)
    return 0 if bad == 0 else 1


COMMANDS = {
    "build-p0": (cmd_build_p0, "build P0(M, N) from a base pair"),
    "build-e1": (cmd_build_e1, "build the unitriangular pair (P, Q(M, N))"),
    "check-n23": (cmd_check_n23, "test A^2 = 0, B^3 = 0, AB^2 = 0, AB = BA"),
    "poly-apply": (cmd_poly_apply, "apply a polynomial substitution to a pair"),
    "similar": (cmd_similar, "decide simultaneous similarity of two pairs"),
    "poly-similar": (cmd_poly_similar, "decide polynomial similarity of two N23 pairs"),
    "verify-lemma1": (cmd_verify_lemma1, "check the normalising conjugation chain on random inputs"),
    "verify-theorem": (cmd_verify_theorem, "check that polynomial similarity of P0 pairs forces base similarity"),
    "verify-e1": (cmd_verify_e1, "check the unitriangular pair construction on random bases"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", type=int, dest="p", help="prime modulus p")
    common.add_argument("--n", type=int, default=1, help="base matrix size (default: 1)")
    common.add_argument("--trials", type=int, default=10, help="number of trials (default: 10)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    common.add_argument("--mode", choices=["exhaustive", "random"], default="random",
                        help="instance generation for verify-theorem (default: random)")
    common.add_argument("--budget", type=int, default=similarity.DEFAULT_BUDGET,
                        help="random trials per invertibility search")
    common.add_argument("--max-q", type=int, default=5000, dest="max_q",
                        help="substitutions searched before falling back to sampling")
    common.add_argument("--probe", type=int, default=0,
                        help="extra substitutions per (alpha, beta) tested on each theorem instance")
    common.add_argument("--json", action="store_true", help="emit JSON lines")
    common.add_argument("--timing", action="store_true", help="add wall-clock timings to reports")
    common.add_argument("--out", type=Path, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="pairlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=helptext, description=helptext)
        if name in ("build-p0", "build-e1"):
            sp.add_argument("inputs", nargs="+", type=Path, help="pair file, or M and N matrix files")
        elif name in ("check-n23", "poly-apply"):
            sp.add_argument("inputs", nargs=1, type=Path, help="pair file")
        elif name in ("similar", "poly-similar"):
            sp.add_argument("inputs", nargs=2, type=Path, help="two pair files")
        if name == "poly-apply":
            sp.add_argument("--f", help="polynomial file for the first component")
            sp.add_argument("--g", help="polynomial file for the second component")
            sp.add_argument("--quad", help="alpha,beta,gamma,alpha1,alpha2,beta1,beta2")
    return parser


def run_command(cfg: RunConfig) -> int:
    cfg.validate()
    rep = Reporter(cfg)
    fn = COMMANDS[cfg.command][0]
    code = fn(cfg, rep)
    rep.flush()
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    cfg = RunConfig(
        command=args.command, p=args.p, n=args.n, trials=args.trials, seed=args.seed,
        mode=args.mode, budget=args.budget, max_q=args.max_q, probe=args.probe,
        json=args.json, timing=args.timing, out=args.out,
        inputs=list(getattr(args, "inputs", []) or []),
        extra={k: getattr(args, k, None) for k in ("f", "g", "quad")},
    )
    try:
        return run_command(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MatrixFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
