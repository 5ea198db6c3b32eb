"""Command-line interface: ``ssmlang <command> ...``.

Exit codes: 0 success, 1 failed check or NON-STAR-FREE, 2 refusal,
3 or more for errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .automata import minimize_dfa, parse_dfa, transition_monoid, is_aperiodic
from .compiler import NotStarFree, compile_language, compile_star_free
from .languages import (
    LENGTH_BINS,
    format_record,
    generate_samples,
    get_language,
    language_from_dfa,
)
from .numerics import DEFAULT_PRECISION, UnitRotation, fx_to_str
from .ssm import load_model, save_model, trace
from .verify import (
    Exhaustive,
    RandomWords,
    check_equivalence,
    emit_report,
    parity_convergence_demo,
    random_nonneg_corpus,
    reports_to_csv,
)

EXIT_OK, EXIT_FAIL, EXIT_REFUSED, EXIT_ERROR = 0, 1, 2, 3

ROTATION_HINT = ("PARITY needs a gate outside [0, 1]: retry with --gates signed or "
                 "--gates rotation (rotation also covers aa, aaaa, tomita6)")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers


def _language_params(args) -> dict:
    params = {}
    if getattr(args, "K", None) is not None:
        params["K"] = args.K
    if getattr(args, "h", None) is not None:
        params["h"] = args.h
    return params


def _read_dfa(path: str):
    return parse_dfa(Path(path).read_text(encoding="utf-8"))


def _language(args):
    if args.dfa:
        return language_from_dfa(_read_dfa(args.dfa), Path(args.dfa).stem)
    if not args.lang:
        raise UsageError("give --lang NAME or --dfa PATH")
    return get_language(args.lang, **_language_params(args))


def _length_range(args, default=(1, 50)) -> tuple[int, int]:
    if args.bin is not None:
        return LENGTH_BINS[args.bin]
    if args.max_len is not None:
        return (1, args.max_len)
    return default


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def parse_word(text: str, alphabet) -> list[str]:
    """Split ``text`` into alphabet symbols: by whitespace if present, else greedily."""
    if any(c.isspace() for c in text):
        word = text.split()
    else:
        symbols = sorted(alphabet, key=len, reverse=True)
        word, i = [], 0
        while i < len(text):
            for s in symbols:
                if text.startswith(s, i):
                    word.append(s)
                    i += len(s)
                    break
            else:
                raise UsageError(f"cannot split {text[i:]!r} into symbols of {alphabet}")
    bad = [a for a in word if a not in alphabet]
    if bad:
        raise UsageError(f"symbols {bad} not in alphabet {alphabet}")
    return word


def _fmt_vector(v, p: int) -> str:
    parts = []
    for x in v:
        if isinstance(x, tuple):
            m, r = x
            parts.append(f"{fx_to_str(m, p)}@{r}" if isinstance(r, UnitRotation) else str(x))
        else:
            parts.append(fx_to_str(x, p))
    return "[" + ", ".join(parts) + "]"


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args) -> int:
    if args.dfa:
        dfa = _read_dfa(args.dfa)
    else:
        spec = _language(args)
        if spec.dfa is None:
            print(f"{spec.name} is not a regular language; classify needs a DFA", file=sys.stderr)
            return EXIT_REFUSED
        dfa = spec.dfa
    minimal = minimize_dfa(dfa)
    size = len(transition_monoid(minimal))
    star_free = is_aperiodic(minimal)
    print(f"{'STAR-FREE' if star_free else 'NON-STAR-FREE'} "
          f"(minimal DFA states: {minimal.n_states}, transition monoid size: {size})")
    return EXIT_OK if star_free else EXIT_FAIL


def cmd_compile(args) -> int:
    try:
        if args.dfa:
            if args.gates != "nonneg":
                raise UsageError("--dfa input supports only --gates nonneg")
            dfa = _read_dfa(args.dfa)
            model = compile_star_free(dfa, precision=args.precision, name=Path(args.dfa).stem)
        else:
            if not args.lang:
                raise UsageError("give --lang NAME or --dfa PATH")
            model = compile_language(args.lang, gates=args.gates, precision=args.precision,
                                     **_language_params(args))
    except NotStarFree as exc:
        print(f"refused: {exc}", file=sys.stderr)
        print(ROTATION_HINT, file=sys.stderr)
        return EXIT_REFUSED
    if args.out:
        save_model(model, args.out)
    else:
        from .ssm import dumps_model

        sys.stdout.write(dumps_model(model))
    print(f"compiled {model.name}: {len(model.layers)} layers, state width {model.width}, "
          f"precision {model.precision}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    model = load_model(args.model)
    spec = _language(args)
    strategies = []
    if args.exhaustive is not None:
        strategies.append(Exhaustive(args.exhaustive))
    if args.random is not None or not strategies:
        count = args.random if args.random is not None else 1000
        strategies.append(RandomWords(count, _length_range(args), args.seed, args.mode))
    reports = [check_equivalence(model, spec, s) for s in strategies]
    if args.out:
        emit_report(reports, args.out, args.format)
    elif args.format == "json":
        from .verify import report_to_dict

        print(json.dumps([report_to_dict(r) for r in reports], indent=2, sort_keys=True))
    else:
        sys.stdout.write(reports_to_csv(reports))
    for r in reports:
        for m in r.mismatches[:3]:
            print(f"mismatch: {m.word!r} at {m.position}: expected {m.expected}, got {m.got}",
                  file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_demo_parity(args) -> int:
    models = []
    if args.model:
        models.append(load_model(args.model))
    if args.random:
        models.extend(random_nonneg_corpus(args.random, args.seed, args.precision))
    if not models:
        raise UsageError("give a model file or --random COUNT")
    records = []
    for model in models:
        if not model.nonnegative:
            print(f"refused: {model.name or 'model'} does not have NONNEGATIVE gates; the "
                  "convergence argument does not apply", file=sys.stderr)
            return EXIT_REFUSED
        rec = parity_convergence_demo(model, args.N, tuple(parse_word(args.period, model.alphabet)))
        records.append(rec)
        print(f"{rec.model_id or 'model'} {rec.pattern} stationarityStep={rec.stationarity_step}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = _language(args)
    count = args.random if args.random is not None else 1000
    samples = generate_samples(spec, _length_range(args), count, args.seed, args.mode)
    _write("".join(format_record(w, labels, spec.alphabet) + "\n" for w, labels in samples),
           args.out)
    return EXIT_OK


def cmd_trace(args) -> int:
    model = load_model(args.model)
    word = parse_word(args.word, model.alphabet)
    p = model.precision
    lines = []
    for t, (a, rec) in enumerate(zip(word, trace(model, word)), start=1):
        lines.append(f"t={t} symbol={a}")
        for i, (h, z) in enumerate(zip(rec.h, rec.z), start=1):
            lines.append(f"  layer {i} h={_fmt_vector(h, p)}")
            lines.append(f"  layer {i} z={_fmt_vector(z, p)}")
    _write("\n".join(lines) + ("\n" if lines else ""), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help="fractional bits p (default %(default)s)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")

    lang = argparse.ArgumentParser(add_help=False)
    lang.add_argument("--lang", help="catalog language, e.g. tomita4, d12, dyck1, bdyck")
    lang.add_argument("--dfa", help="DFA text file")
    lang.add_argument("--K", type=int, help="bracket types for bdyck")
    lang.add_argument("--h", type=int, help="depth bound for bdyck")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--bin", type=int, choices=sorted(LENGTH_BINS),
                          help="length bin: 1=[1,50], 2=[51,100], 3=[101,150]")
    sampling.add_argument("--max-len", type=int, help="lengths in [1, MAX_LEN]")
    sampling.add_argument("--random", type=int, help="number of random words")
    sampling.add_argument("--mode", choices=("id", "sparse"), help="Flip-Flop instruction mix")

    parser = argparse.ArgumentParser(prog="ssmlang", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common, lang], help="decide star-freeness")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("compile", parents=[common, lang], help="compile a language to a model")
    p.add_argument("--gates", choices=("nonneg", "signed", "rotation"), default="nonneg")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", parents=[common, lang, sampling],
                       help="check a model against the language oracle")
    p.add_argument("model")
    p.add_argument("--exhaustive", type=int, metavar="N", help="all prefixes up to length N")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo-parity", parents=[common],
                       help="stationarity of nonnegative models on 1^N")
    p.add_argument("model", nargs="?")
    p.add_argument("--random", type=int, default=0, metavar="COUNT",
                   help="also run COUNT random nonnegative models")
    p.add_argument("--N", type=int, default=10_000)
    p.add_argument("--period", default="1", help="repeated input block (default 1)")
    p.set_defaults(func=cmd_demo_parity)

    p = sub.add_parser("gen", parents=[common, lang, sampling], help="generate a dataset")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("trace", parents=[common], help="dump per-layer activations")
    p.add_argument("model")
    p.add_argument("word")
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR + 1


if __name__ == "__main__":
    sys.exit(main())
