"""Command-line front end.

Exit codes: 0 success, 1 check mismatch, 2 invalid input or model,
3 instance too large for the brute-force oracle.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import engine, oracle
from .model import ModelError, binary_model, linear_vacuous, load_model, save_model
from .numerics import ComparePolicy, resolve_backend

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_GUARD = 3


def number(text: str):
    """Probability argument: decimal or ``a/b``, kept exact."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def tau_arg(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("tau must be >= 0")
    return v


def thread_count(flag: int | None) -> int:
    env = os.environ.get("ESTIHMM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ModelError(f"ESTIHMM_THREADS must be an integer, got {env!r}") from None
    if flag is not None:
        return max(1, flag)
    return os.cpu_count() or 1


def _read_obs(args, model) -> tuple:
    if args.obs is not None and args.obs_file is not None:
        raise ModelError("give either --obs or --obs-file, not both")
    if args.obs_file is not None:
        text = Path(args.obs_file).read_text(encoding="utf-8")
        if model.outputs.single_char and "," not in text:
            text = "".join(text.split())
        else:
            text = ",".join(t.strip() for t in text.replace("\n", ",").split(",") if t.strip())
    elif args.obs is not None:
        text = args.obs
    else:
        raise ModelError("an observation is required (--obs or --obs-file)")
    return model.outputs.split(text)


def _write_lines(lines, out_path) -> None:
    text = "".join(line + "\n" for line in lines)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_decode(args) -> int:
    model = load_model(args.model)
    obs = _read_obs(args, model)
    res = engine.decode(
        model, obs, policy=ComparePolicy(args.tau), backend=args.backend, method=args.method
    )
    if args.count_only:
        _write_lines([str(res.count)], args.out)
    else:
        _write_lines((model.states.join(s) for s in res.trie.sequences()), args.out)
    if args.verbose:
        for k, v in res.diagnostics.items():
            print(f"{k}: {v}", file=sys.stderr)
    return EXIT_OK


def cmd_check(args) -> int:
    model = load_model(args.model)
    obs = _read_obs(args, model)
    try:
        expected = oracle.brute_force_maximal(model, obs, backend=_backend(args))
    except oracle.OracleTooLarge as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_GUARD
    got = engine.decode(model, obs, backend=_backend(args), method=args.method).to_set()
    if got == expected:
        print(f"MATCH {len(got)}")
        return EXIT_OK
    print("MISMATCH")
    for seq in sorted(got - expected):
        print(f"+ {model.states.join(seq)}  (decoder only)")
    for seq in sorted(expected - got):
        print(f"- {model.states.join(seq)}  (oracle only)")
    return EXIT_MISMATCH


def _backend(args):
    if args.backend == "rational":
        return "rational"
    return resolve_backend("log", ComparePolicy(args.tau))


def _eps_triplet(args):
    eps = args.eps if args.eps is not None else Fraction(0)
    em = args.eps_marginal if args.eps_marginal is not None else eps
    et = args.eps_transition if args.eps_transition is not None else eps
    ee = args.eps_emission if args.eps_emission is not None else (eps if args.eps_all else Fraction(0))
    return em, et, ee


def cmd_make_binary(args) -> int:
    base = binary_model(args.m, args.r, args.s, args.p, args.q, args.n)
    em, et, ee = _eps_triplet(args)
    model = linear_vacuous(base, em, et, ee)
    save_model(model, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .harness.heatmap import write_csv, write_heatmap
    from .harness.sweep import SweepConfig, sweep_grid

    em, et, ee = _eps_triplet(args)
    config = SweepConfig(
        resolution=args.grid,
        m=args.m,
        r=args.r,
        s=args.s,
        obs=args.obs,
        eps_marginal=em,
        eps_transition=et,
        eps_emission=ee,
        backend=args.backend,
        tau=args.tau,
    )
    result = sweep_grid(config, threads=thread_count(args.threads))
    if args.csv is None and args.pgm is None:
        write_csv(result, sys.stdout)
    else:
        write_heatmap(result, csv_path=args.csv, pgm_path=args.pgm)
    return EXIT_OK


def cmd_loci(args) -> int:
    from .harness.loci import indifference_loci

    for line in indifference_loci(args.m, args.r, args.s, args.obs).lines():
        print(line)
    return EXIT_OK


def _read_pairs(path) -> list[tuple[str, str]]:
    pairs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or len(parts[0]) != len(parts[1]):
            raise ModelError(f"{path}:{lineno}: expected 'original<TAB>observed' of equal length")
        pairs.append((parts[0], parts[1]))
    return pairs


def cmd_ocr_synth(args) -> int:
    from .harness.ocr import synthetic_corpus

    _write_lines(synthetic_corpus(args.words, args.seed), args.out)
    return EXIT_OK


def cmd_ocr_corrupt(args) -> int:
    from .harness.ocr import CorruptionSpec, corrupt_text, tokenize

    words = tokenize(Path(args.input).read_text(encoding="utf-8"))
    confusion = None
    if args.confusion:
        confusion = json.loads(Path(args.confusion).read_text(encoding="utf-8"))
    spec = CorruptionSpec(eta=args.eta, confusion=confusion, seed=args.seed)
    observed = corrupt_text(words, spec)
    if args.pairs:
        Path(args.pairs).write_text(
            "".join(f"{o}\t{c}\n" for o, c in zip(words, observed)), encoding="utf-8"
        )
    _write_lines(observed, args.out)
    return EXIT_OK


def cmd_ocr_train(args) -> int:
    from .harness.ocr import ocr_train

    models = ocr_train(_read_pairs(args.pairs), s_idm=args.s_idm, s_perks=args.s_perks)
    save_model(models.imprecise, args.imprecise)
    save_model(models.precise, args.precise)
    return EXIT_OK


def cmd_ocr_eval(args) -> int:
    from .harness.ocr import OcrModels, ocr_evaluate, ocr_train

    pairs = _read_pairs(args.pairs)
    if args.imprecise or args.precise:
        if not (args.imprecise and args.precise):
            raise ModelError("--imprecise and --precise must be given together")
        models = OcrModels(load_model(args.imprecise), load_model(args.precise))
    else:
        models = ocr_train(pairs, s_idm=args.s_idm, s_perks=args.s_perks)
    report = ocr_evaluate(
        pairs, models, tau=args.tau, backend=args.backend, threads=thread_count(args.threads)
    )
    text = report.render()
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    return EXIT_OK


def cmd_bench(args) -> int:
    import warnings

    from .harness.bench import bench_length, bench_states

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.axis == "length":
            table = bench_length(tuple(args.values or (100, 200, 400)), args.states, args.reps)
        else:
            table = bench_states(tuple(args.values or (2, 4, 8)), args.n, args.reps)
    for line in table.lines():
        print(line)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return EXIT_OK


def _add_obs(p) -> None:
    p.add_argument("--obs", help="observation; per character, or comma-separated labels")
    p.add_argument("--obs-file", help="file holding the observation")


def _add_numeric(p, default_backend="log", default_tau=1e-12) -> None:
    p.add_argument("--backend", choices=("log", "rational"), default=default_backend)
    p.add_argument(
        "--tau",
        type=tau_arg,
        default=default_tau,
        help="relative tie tolerance on log magnitudes (log backend only)",
    )


def _add_eps(p, all_default: bool) -> None:
    p.add_argument("--eps", type=number, help="contamination for marginal and transition tables")
    p.add_argument("--eps-marginal", type=number)
    p.add_argument("--eps-transition", type=number)
    p.add_argument("--eps-emission", type=number)
    p.add_argument(
        "--eps-all",
        action="store_true",
        default=all_default,
        help="let --eps also contaminate the emission table",
    )


def _add_binary(p, with_pq: bool) -> None:
    p.add_argument("--m", type=number, default=Fraction(1, 10), help="P(first state = 0)")
    p.add_argument("--r", type=number, default=Fraction(4, 5), help="P(output 0 | state 0)")
    p.add_argument("--s", type=number, default=Fraction(3, 10), help="P(output 0 | state 1)")
    if with_pq:
        p.add_argument("--p", type=number, required=True, help="P(next 0 | current 0)")
        p.add_argument("--q", type=number, required=True, help="P(next 0 | current 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="estihmm", description="Maximal state sequences of imprecise hidden Markov models."
    )
    parser.add_argument("--threads", type=int, help="worker processes (ESTIHMM_THREADS overrides)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decode", help="print every maximal state sequence")
    p.add_argument("--model", required=True)
    _add_obs(p)
    _add_numeric(p)
    p.add_argument("--method", choices=engine.METHODS, default="backward")
    p.add_argument("--count-only", action="store_true", help="print only the number of sequences")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--verbose", action="store_true", help="print diagnostics to stderr")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("check", help="compare the decoder with brute-force enumeration")
    p.add_argument("--model", required=True)
    _add_obs(p)
    _add_numeric(p, default_backend="rational", default_tau=0.0)
    p.add_argument("--method", choices=engine.METHODS, default="backward")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("make-binary", help="write a contaminated binary stationary model")
    _add_binary(p, with_pq=True)
    p.add_argument("--n", type=int, required=True, help="chain length")
    _add_eps(p, all_default=False)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_make_binary)

    p = sub.add_parser("sweep", help="maximal-set counts over a (p, q) grid")
    _add_binary(p, with_pq=False)
    p.add_argument("--obs", default="01")
    p.add_argument("--grid", type=int, default=201, help="points per axis, endpoints included")
    _add_eps(p, all_default=False)
    _add_numeric(p)
    p.add_argument("--csv", help="CSV output path (stdout if neither --csv nor --pgm)")
    p.add_argument("--pgm", help="plain PGM output path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("loci", help="tie lines for a binary chain of length two")
    _add_binary(p, with_pq=False)
    p.add_argument("--obs", default="01")
    p.set_defaults(func=cmd_loci)

    p = sub.add_parser(
        "ocr",
        help="OCR demo; words are uppercased maximal runs of letters",
        description="Toy OCR pipeline. Input text is split into words (maximal runs of"
        " letters, uppercased); corruption substitutes characters independently.",
    )
    osub = p.add_subparsers(dest="ocr_command", required=True)

    q = osub.add_parser("synth", help="write a seeded pseudo-word corpus, one word per line")
    q.add_argument("--words", type=int, default=200)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.set_defaults(func=cmd_ocr_synth)

    q = osub.add_parser("corrupt", help="corrupt the words of a text file")
    q.add_argument("--input", required=True, help="UTF-8 text file")
    q.add_argument("--eta", type=float, default=0.1, help="per-character substitution probability")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--confusion", help='JSON file {"A": {"O": 2.0, ...}, ...} of replacement weights')
    q.add_argument("--pairs", help="also write original<TAB>observed lines here")
    q.add_argument("--out", help="observed words, one per line (default stdout)")
    q.set_defaults(func=cmd_ocr_corrupt)

    q = osub.add_parser("train", help="fit IDM and Perks models from word pairs")
    q.add_argument("--pairs", required=True)
    q.add_argument("--s-idm", type=number, default=Fraction(2))
    q.add_argument("--s-perks", type=number, default=Fraction(2))
    q.add_argument("--imprecise", required=True, help="output path of the interval model")
    q.add_argument("--precise", required=True, help="output path of the precise model")
    q.set_defaults(func=cmd_ocr_train)

    q = osub.add_parser("eval", help="decode every observed word and tabulate outcomes")
    q.add_argument("--pairs", required=True)
    q.add_argument("--s-idm", type=number, default=Fraction(2))
    q.add_argument("--s-perks", type=number, default=Fraction(2))
    q.add_argument("--imprecise", help="trained interval model (default: train from --pairs)")
    q.add_argument("--precise", help="trained precise model")
    _add_numeric(q)
    q.add_argument("--report", help="text report path (default stdout)")
    q.add_argument("--csv", help="per-word CSV path")
    q.set_defaults(func=cmd_ocr_eval)

    p = sub.add_parser("bench", help="decode timing against chain length or state count")
    p.add_argument("--axis", choices=("length", "states"), default="length")
    p.add_argument("--values", type=int, nargs="+")
    p.add_argument("--states", type=int, default=2, help="state count for the length axis")
    p.add_argument("--n", type=int, default=50, help="chain length for the states axis")
    p.add_argument("--reps", type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except oracle.OracleTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ModelError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
