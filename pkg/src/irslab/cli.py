"""Command-line front end.

Every run produces a RunRecord: the resolved configuration, wall time, outputs
and warnings.  ``--out`` writes it as JSON (or, with ``--format csv``, writes
curve data there and the record next to it).  ``replay`` re-runs a record and
diffs the outputs.

Configuration is layered: defaults, then a ``--config`` file of flat
``key=value`` lines named like the long flags, then ``IRSLAB_*`` environment
variables (``IRSLAB_BUDGET_WORDS=100000``), then the command line.

Per-trial seeds are ``splitmix64(seed ^ trial)``.

Exit codes: 0 success, 1 error or replay mismatch, 2 a budget-relative
negative verdict (no periodic point within Pmax, no cover hypothesis within
the enumeration bounds).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__, arith, chabauty, glue, pantsurf
from .errors import IrsLabError
from .hyp2 import HPoint, translation_length
from .symdyn import (
    Bernoulli,
    FreeWord,
    Markov,
    PeriodicOrbit,
    SubshiftFamily,
    WindowWord,
    axis_of,
    embed_string,
    factor_set,
    find_periodic,
    periodic_factors_ok,
    shortest_period,
    thue_morse_family,
)

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
MASK64 = (1 << 64) - 1
FLOAT_TOL = 1e-12
ENV_PREFIX = "IRSLAB_"


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(seed, trial):
    return splitmix64((seed ^ trial) & MASK64)


class Outcome:
    """What a command hands back: JSON-able outputs, a summary line, optional CSV rows."""

    def __init__(self, outputs, summary, code=EXIT_OK, warnings=(), csv=None):
        self.outputs = outputs
        self.summary = summary
        self.code = code
        self.warnings = list(warnings)
        self.csv = csv


# --- input helpers --------------------------------------------------------------------


def _read_inline_or_file(text):
    p = Path(text)
    if len(text) < 4096 and p.is_file():
        return p.read_text()
    return text


def _family(text):
    if text in ("thue-morse", "tm"):
        return thue_morse_family()
    raw = _read_inline_or_file(text)
    words = [w.strip() for line in raw.splitlines() for w in line.split(",") if w.strip()]
    if raw.lstrip().startswith("["):
        words = json.loads(raw)
    return SubshiftFamily.of(words)


def _alpha(text):
    raw = _read_inline_or_file(text).strip()
    if raw.startswith("{"):
        obj = json.loads(raw)
        return WindowWord(obj["letters"], obj.get("offset", len(obj["letters"]) // 2))
    return WindowWord.centered("".join(raw.split()))


def parse_measure(text):
    """'bernoulli:1/2,1/2', 'periodic:011' or 'markov:0.9,0.1;0.2,0.8'."""
    kind, _, args = text.partition(":")
    kind = kind.strip().lower()
    if kind == "bernoulli":
        return Bernoulli(tuple(Fraction(x) for x in args.split(",")))
    if kind == "periodic":
        return PeriodicOrbit(args.strip())
    if kind == "markov":
        return Markov(tuple(tuple(float(x) for x in row.split(",")) for row in args.split(";")))
    raise ValueError(f"unknown measure {kind!r}")


def _group(text):
    obj = json.loads(_read_inline_or_file(text))
    return chabauty.group_from_json(obj)


def _ints(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def _place(p, d, root):
    if d == 1:
        return [arith.PadicPlace.rational(p)]
    places = arith.PadicPlace.split(d, p)
    if root is not None:
        places = [pl for pl in places if pl.root == root]
        if not places:
            raise ValueError(f"{root} is not a square root of {d} mod {p}")
    return places


def _sqrt_flag(text):
    if text is None:
        return 1, None
    d, _, r = text.partition(":")
    return int(d), (int(r) if r else None)


# --- commands -------------------------------------------------------------------------


def cmd_pants_sample(a):
    tree = pantsurf.TreeSpec.regular(a.R)
    law = pantsurf.parse_law(a.law)
    g = pantsurf.sample_surface(tree, law, trial_seed(a.seed, 0))
    out = g.to_json()
    return Outcome(out, f"rank {g.rank}, {tree.n_vertices} pants, min length {min(g.fn.lengths):.6g}")


def cmd_pants_systole(a):
    tree = pantsurf.TreeSpec.regular(a.R)
    law = pantsurf.parse_law(a.law)
    rows = []
    for t in range(a.trials):
        s = trial_seed(a.seed, t)
        g = pantsurf.sample_surface(tree, law, s)
        l = min(g.fn.lengths)
        sys_ = pantsurf.systole_oracle(g, a.W, a.budget_words, a.max_displacement)
        inj = pantsurf.inj_radius_at(g, g.base_frame, a.W, a.budget_words, a.max_displacement)
        rows.append({"seed": s, "l": l, "R": a.R, "W": a.W,
                     "star_bound": pantsurf.star_bound(l, a.R),
                     "star_bound_collar": pantsurf.star_bound_collar(l, a.R),
                     "oracle_systole": sys_, "inj_radius": inj})
    bad = sum(r["oracle_systole"] < min((r["l"] - 1) / 2, r["star_bound_collar"]) - 1e-9 for r in rows)
    csv = [pantsurf.SYSTOLE_CSV_FIELDS] + [tuple(r[k] for k in pantsurf.SYSTOLE_CSV_FIELDS) for r in rows]
    return Outcome({"rows": rows, "violations": bad},
                   f"{len(rows)} trials, min systole {min(r['oracle_systole'] for r in rows):.6g}, "
                   f"violations {bad}", csv=csv)


def cmd_subshift_factors(a):
    fam = _family(a.family)
    fs = sorted(factor_set(fam, a.L))
    return Outcome({"factors": fs}, " ".join(fs))


def cmd_subshift_periodic(a):
    fam = _family(a.family)
    word = find_periodic(fam, a.L, a.pmax)
    if word is not None:
        return Outcome({"periodic": word, "period": len(word),
                        "factorsAdmitted": periodic_factors_ok(word, fam, a.L)}, word)
    p = shortest_period(fam, a.L)
    if p is None:
        return Outcome({"periodic": None, "shortestCycle": None}, "none")
    return Outcome({"periodic": None, "shortestCycle": p}, "none", EXIT_INCONCLUSIVE,
                   [f"shortest cycle has period {p} > pmax {a.pmax}"])


def cmd_freegeo_axis(a):
    g = FreeWord.parse(a.word)
    gamma, period = axis_of(g, a.reps)
    return Outcome({"steps": list(gamma.steps), "lo": gamma.lo, "anchor": str(gamma.anchor),
                    "period": period}, f"period {period}, anchor {gamma.anchor}")


def cmd_freegeo_embed(a):
    gamma = embed_string(_alpha(a.string))
    pts = gamma.points()
    return Outcome({"steps": list(gamma.steps), "lo": gamma.lo,
                    "points": {str(i): str(pts[i]) for i in sorted(pts)}},
                   " ".join(str(FreeWord((s,))) for s in gamma.steps))


def cmd_glue_nu_prime(a):
    geom = glue.BlockGeometry.parse(a.vols)
    m = parse_measure(a.measure)
    w = glue.nu_prime_weight(geom, m)
    outputs = {"weight": str(w), "weightFloat": float(w)}
    summary = f"{w}"
    if a.samples:
        rows = glue.sample_nu_prime_batch(geom, m, a.length, a.samples, trial_seed(a.seed, 0))
        emp = float(rows[:, a.length // 2].mean())
        se = math.sqrt(float(w) * (1 - float(w)) / a.samples)
        outputs.update(empirical=emp, samples=a.samples, standardError=se)
        summary += f" empirical {emp:.6f} (n={a.samples})"
    return Outcome(outputs, summary)


def cmd_glue_cover_check(a):
    geom = glue.BlockGeometry.parse(a.vols)
    alpha = _alpha(a.alpha)
    space = glue._hypothesis_space_size(a.max_components, a.max_count)
    if space > a.budget_hypotheses:
        raise IrsLabError(f"hypothesis space {space} exceeds budget {a.budget_hypotheses}")
    res = glue.find_cover(alpha, geom, a.max_components, a.max_count)
    h = None if res.hypothesis is None else {**res.hypothesis.to_json(), "word": res.word}
    out = {"consistentHypothesis": h, "budget": res.budget()}
    if h is None:
        return Outcome(out, "none", EXIT_INCONCLUSIVE,
                       ["no hypothesis within the enumeration bounds; verdict is budget-relative"])
    return Outcome(out, res.word)


def cmd_glue_realize(a):
    twists = "random" if a.random_twists else None
    chain = glue.realize_chain(_alpha(a.alpha).letters, a.L0, a.L1, a.sigma,
                               seed=trial_seed(a.seed, 0), twists=twists)
    if a.close:
        chain = glue.close_chain(chain)
    internal = [translation_length(chain.internal_curve(i)) for i in range(len(chain.alpha))]
    return Outcome({"internalLengths": internal, "group": chain.group.to_json()},
                   f"rank {chain.group.rank}, internal lengths ok {glue.internal_lengths_ok(chain)}")


def cmd_arith_hilbert(a):
    d, root = _sqrt_flag(a.sqrt)
    x, y = arith.QuadElem.parse(a.a, d), arith.QuadElem.parse(a.b, d)
    rows = []
    for pl in _place(a.p, d, root):
        row = {"root": pl.root, "symbol": arith.hilbert_symbol(x, y, pl)}
        if d == 1:
            row["oracle"] = arith.hilbert_oracle(x.a, y.a, a.p)
        rows.append(row)
    return Outcome({"places": rows}, " ".join(str(r["symbol"]) for r in rows))


def cmd_arith_eps(a):
    q = arith.DiagonalForm.parse(a.q, a.d)
    rows = [{"root": pl.root, "eps": arith.eps_invariant(q, pl)} for pl in _place(a.p, a.d, a.root)]
    return Outcome({"places": rows}, " ".join(str(r["eps"]) for r in rows))


def cmd_arith_commensurable(a):
    q = arith.DiagonalForm.parse(a.q, a.d)
    q2 = arith.DiagonalForm.parse(a.qp, a.d)
    rows = []
    for pl in _place(a.p, a.d, a.root):
        rep = arith.similarity_obstruction(q, q2, pl)
        rows.append({"root": pl.root, **rep.to_json()})
    sig = [arith.signature_check(q).ok, arith.signature_check(q2).ok]
    return Outcome({"places": rows, "signatureOk": sig}, " ".join(r["verdict"] for r in rows))


def cmd_chabauty_dist(a):
    S1 = chabauty.ball_set(_group(a.groupA), a.R, a.W, a.prune, a.budget_words)
    S2 = chabauty.ball_set(_group(a.groupB), a.R, a.W, a.prune, a.budget_words)
    d = chabauty.proxy_distance(S1, S2)
    return Outcome({"distance": d, "sizes": [len(S1), len(S2)]}, f"{d:.12g}")


def cmd_chabauty_limitset(a):
    gens = _group(a.group)
    base = HPoint(*a.base) if a.base else HPoint(0.0, 1.0)
    curve = chabauty.density_curve(gens, base, range(1, a.W + 1), a.budget_words)
    return Outcome({"curve": [[w, g] for w, g in curve]}, f"gap {curve[-1][1]:.6g} at W={a.W}",
                   csv=[("W", "gap")] + curve)


def cmd_chabauty_lattice_limit(a):
    curve = chabauty.lattice_limit_experiment(a.word, tuple(_ints(a.ks)), a.R, a.W, a.L0, a.L1,
                                              a.sigma, prune_norm=a.prune, budget=a.budget_words)
    rows = [(p.k, p.distance) for p in curve]
    mono = chabauty.curve_nonincreasing(curve)
    return Outcome({"curve": [list(r) for r in rows], "nonincreasing": mono},
                   " ".join(f"{k}:{d:.3g}" for k, d in rows), csv=[("k", "distance")] + rows)


# --- parser -------------------------------------------------------------------------


def _globals(p, suppress):
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=dflt(0))
    p.add_argument("--out", default=dflt(None))
    p.add_argument("--format", choices=("json", "csv"), default=dflt("json"))
    p.add_argument("--budget-words", type=int, default=dflt(10_000_000))
    p.add_argument("--budget-hypotheses", type=int, default=dflt(10 ** 12))
    p.add_argument("--config", default=dflt(None))


def build_parser():
    top = argparse.ArgumentParser(prog="irslab", description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=__version__)
    _globals(top, False)
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, True)
    groups = top.add_subparsers(dest="group", required=True)
    leaves = {}

    def section(name):
        return name, groups.add_parser(name).add_subparsers(dest="cmd", required=True)

    def leaf(group, name, fn):
        gname, action = group
        p = action.add_parser(name, parents=[common])
        p.set_defaults(func=fn)
        leaves[(gname, name)] = p
        return p

    g = section("pants")
    p = leaf(g, "sample", cmd_pants_sample)
    p.add_argument("--law", default="point:4")
    p.add_argument("-R", type=int, default=2)
    p = leaf(g, "systole", cmd_pants_systole)
    p.add_argument("--law", default="point:4")
    p.add_argument("-R", type=int, default=2)
    p.add_argument("-W", type=int, default=8)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--max-displacement", type=float, default=20.0)

    g = section("subshift")
    p = leaf(g, "factors", cmd_subshift_factors)
    p.add_argument("--family", required=True)
    p.add_argument("-L", type=int, required=True)
    p = leaf(g, "periodic", cmd_subshift_periodic)
    p.add_argument("--family", required=True)
    p.add_argument("-L", type=int, required=True)
    p.add_argument("--pmax", type=int, default=16)

    g = section("freegeo")
    p = leaf(g, "axis", cmd_freegeo_axis)
    p.add_argument("--word", required=True)
    p.add_argument("--reps", type=int, default=None)
    p = leaf(g, "embed", cmd_freegeo_embed)
    p.add_argument("--string", required=True)

    g = section("glue")
    p = leaf(g, "nu-prime", cmd_glue_nu_prime)
    p.add_argument("--measure", default="bernoulli:1/2,1/2")
    p.add_argument("--vols", default="1,3,1")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--length", type=int, default=1)
    p = leaf(g, "cover-check", cmd_glue_cover_check)
    p.add_argument("--alpha", required=True)
    p.add_argument("--vols", default="1,1,1")
    p.add_argument("--max-components", type=int, default=8)
    p.add_argument("--max-count", type=int, default=16)
    p = leaf(g, "realize", cmd_glue_realize)
    p.add_argument("--alpha", required=True)
    p.add_argument("--L0", type=float, default=1.0)
    p.add_argument("--L1", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--close", action="store_true")
    p.add_argument("--random-twists", action="store_true")

    g = section("arith")
    p = leaf(g, "hilbert", cmd_arith_hilbert)
    p.add_argument("-a", required=True)
    p.add_argument("-b", required=True)
    p.add_argument("-p", type=int, required=True)
    p.add_argument("--sqrt", default=None, help="d:root, the square root of d mod p to use")
    for name, fn in (("eps", cmd_arith_eps), ("commensurable", cmd_arith_commensurable)):
        p = leaf(g, name, fn)
        p.add_argument("--q", required=True)
        if name == "commensurable":
            p.add_argument("--qp", required=True)
        p.add_argument("-p", type=int, required=True)
        p.add_argument("--d", type=int, default=1)
        p.add_argument("--root", type=int, default=None)

    g = section("chabauty")
    p = leaf(g, "dist", cmd_chabauty_dist)
    p.add_argument("--groupA", required=True)
    p.add_argument("--groupB", required=True)
    p.add_argument("-R", type=float, default=5.0)
    p.add_argument("-W", type=int, default=6)
    p.add_argument("--prune", type=float, default=None)
    p = leaf(g, "limitset", cmd_chabauty_limitset)
    p.add_argument("--group", required=True)
    p.add_argument("-W", type=int, default=8)
    p.add_argument("--base", type=float, nargs=2, default=None)
    p = leaf(g, "lattice-limit", cmd_chabauty_lattice_limit)
    p.add_argument("--word", default="0")
    p.add_argument("--ks", default="1,2,4,8,16")
    p.add_argument("-R", type=float, default=5.0)
    p.add_argument("-W", type=int, default=6)
    p.add_argument("--L0", type=float, default=1.0)
    p.add_argument("--L1", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--prune", type=float, default=None)

    rp = groups.add_parser("replay", parents=[common])
    rp.add_argument("record")
    rp.set_defaults(func=None)
    return top, leaves


# --- configuration layering -----------------------------------------------------------


def read_config(path):
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line without '=': {line!r}")
        out[key.strip().lstrip("-")] = value.strip()
    return out


def env_config(environ=None):
    environ = os.environ if environ is None else environ
    return {k[len(ENV_PREFIX):].lower().replace("_", "-"): v
            for k, v in environ.items() if k.startswith(ENV_PREFIX)}


def _tokens(settings, leaf):
    """argv tokens for settings the leaf parser understands; unknown keys are skipped."""
    known = leaf._option_string_actions
    out = []
    for key, value in settings.items():
        for flag in (f"--{key}", f"-{key}"):
            if flag in known:
                action = known[flag]
                if action.nargs == 0:
                    if value.lower() in ("1", "true", "yes", "on"):
                        out.append(flag)
                else:
                    out.extend([flag, *value.split()] if action.nargs else [flag, value])
                break
    return out


def _command_span(argv, leaves):
    """Index just past the (group, cmd) words in argv, and the leaf parser."""
    for i in range(len(argv) - 1):
        if (argv[i], argv[i + 1]) in leaves:
            return i + 2, leaves[(argv[i], argv[i + 1])]
    return None, None


def resolve_argv(argv, environ=None):
    """Splice config-file and environment settings in front of the leaf's own flags."""
    top, leaves = build_parser()
    end, leaf = _command_span(argv, leaves)
    if leaf is None:
        return argv
    config_path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
        elif tok.startswith("--config="):
            config_path = tok.split("=", 1)[1]
    env = env_config(environ)
    config_path = config_path or env.pop("config", None)
    settings = read_config(config_path) if config_path else {}
    extra = _tokens(settings, leaf) + _tokens(env, leaf)
    return argv[:end] + extra + argv[end:]


# --- records --------------------------------------------------------------------------


def _jsonable(ns):
    return {k: v for k, v in vars(ns).items() if k not in ("func",) and not callable(v)}


def execute(argv, environ=None):
    """Run a command; returns (exit code, RunRecord dict or None, Outcome or None)."""
    top, _ = build_parser()
    resolved = resolve_argv(list(argv), environ)
    args = top.parse_args(resolved)
    if args.group == "replay":
        return replay(args.record, seed=args.seed if "--seed" in argv else None)
    t0 = time.perf_counter()
    try:
        outcome = args.func(args)
    except (IrsLabError, ValueError, OSError, json.JSONDecodeError) as e:
        err = {"error": type(e).__name__, "message": str(e)}
        print(json.dumps(err), file=sys.stderr)
        return EXIT_ERROR, None, None
    record = {
        "toolVersion": __version__,
        "argv": resolved,
        "config": _jsonable(args),
        "seed": args.seed,
        "wallTime": time.perf_counter() - t0,
        "outputs": outcome.outputs,
        "warnings": outcome.warnings,
        "exitCode": outcome.code,
    }
    return outcome.code, record, outcome


def _write(record, outcome, out, fmt):
    path = Path(out)
    if fmt == "csv" and outcome.csv is not None:
        lines = [",".join(repr(x) if isinstance(x, float) else str(x) for x in row) for row in outcome.csv]
        path.write_text("\n".join(lines) + "\n")
        path = path.with_name(path.name + ".record.json")
    path.write_text(json.dumps(record, indent=2, default=str))


def diff_outputs(a, b, tol=FLOAT_TOL, where="outputs"):
    """List of paths where two output trees differ (floats within tol count as equal)."""
    if isinstance(a, float) or isinstance(b, float):
        if isinstance(a, (int, float)) and isinstance(b, (int, float)):
            if a == b or (math.isfinite(a) and math.isfinite(b) and abs(a - b) <= tol * max(1.0, abs(a))):
                return []
        return [where]
    if isinstance(a, dict) and isinstance(b, dict):
        out = []
        for k in sorted(set(a) | set(b), key=str):
            if k not in a or k not in b:
                out.append(f"{where}.{k}")
            else:
                out += diff_outputs(a[k], b[k], tol, f"{where}.{k}")
        return out
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        if len(a) != len(b):
            return [where]
        out = []
        for i, (x, y) in enumerate(zip(a, b)):
            out += diff_outputs(x, y, tol, f"{where}[{i}]")
        return out
    return [] if a == b else [where]


def _normalize(obj):
    return json.loads(json.dumps(obj, default=str))


def replay(record, seed=None):
    """Re-run a RunRecord (path or dict) and diff its outputs; returns (code, report, None)."""
    if not isinstance(record, dict):
        record = json.loads(Path(record).read_text())
    argv = [t for t in record["argv"]]
    warnings = []
    if record.get("toolVersion") != __version__:
        warnings.append(f"VersionMismatch: record {record.get('toolVersion')}, tool {__version__}")
    if seed is not None:
        argv += ["--seed", str(seed)]
    code, fresh, _ = execute(argv, environ={})
    if fresh is None:
        return EXIT_ERROR, {"verdict": "error", "warnings": warnings}, None
    diffs = diff_outputs(_normalize(record["outputs"]), _normalize(fresh["outputs"]))
    verdict = "identical" if not diffs else "mismatch"
    report = {"verdict": verdict, "differences": diffs, "warnings": warnings}
    return (EXIT_OK if not diffs else EXIT_ERROR), report, None


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        code, record, outcome = execute(argv)
    except SystemExit as e:
        # argparse usage errors exit with 2; remap so 2 keeps its single meaning
        return EXIT_ERROR if e.code not in (0, None) else EXIT_OK
    if outcome is None:
        if record is not None:
            print(json.dumps(record, indent=2))
        return code
    print(outcome.summary)
    for w in outcome.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if record.get("config", {}).get("out"):
        _write(record, outcome, record["config"]["out"], record["config"]["format"])
    return code


if __name__ == "__main__":
    sys.exit(main())
