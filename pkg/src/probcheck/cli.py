"""Command line front end.

Exit codes: 0 success, 2 parse error, 3 semantic or contract error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from typing import List, Optional

from . import numerics as nx
from .automata import PFA, CutPointSpec, acceptance_probability, bounded_emptiness_search, format_word, parse_word
from .counter import POCA, format_histogram, pfa_to_poca, simulate_ocp, validate_poca
from .counter import block_matrix_check, verify_lemma_4_1
from .errors import ParseError, ProbcheckError, SemanticError
from .formats import (
    load_model,
    parse_labels,
    serialize_labels,
    serialize_model,
    serialize_scheduler,
    write_counterexample,
)
from .generators import pfa_instances
from .logic import check_mc, check_mc_initial, check_mdp, is_pctl, parse_formula, serialize
from .errors import UnsupportedFragmentError
from .markov import MDP, MarkovChain
from .reductions import build_reduction_instance, verify_lemma_3_1, verify_lemma_3_2

EXIT_OK, EXIT_PARSE, EXIT_SEMANTIC = 0, 2, 3


def _rational(text: str):
    try:
        return nx.to_prob(text)
    except ValueError:
        raise ParseError(f"not a rational number: {text!r}") from None


def _load(path, kind=None):
    model = load_model(path)
    if kind is not None and not isinstance(model, kind):
        raise SemanticError(f"{path}: expected a {kind.__name__} model, got {type(model).__name__}")
    return model


def cmd_accept(args) -> List[str]:
    pfa = _load(args.model, PFA)
    p = acceptance_probability(pfa, parse_word(args.word, pfa.alphabet))
    return [f"{nx.format_fraction(p)} (= {nx.format_decimal(p)})"]


def cmd_check(args) -> List[str]:
    model = _load(args.model, (MDP, MarkovChain))
    phi = parse_formula(args.formula)
    if not is_pctl(phi):
        raise UnsupportedFragmentError(f"formula {serialize(phi)!r} is outside the PCTL fragment")
    labels = None
    if args.labels:
        with open(args.labels, encoding="utf-8") as fh:
            labels = parse_labels(fh.read())
        unknown = set().union(*labels.values()) - set(model.states) if labels else set()
        if unknown:
            raise SemanticError(f"label file names unknown states {sorted(unknown)}")
    if isinstance(model, MDP):
        sat, verdict = check_mdp(model, labels, phi)
    elif model.initial is not None:
        sat, verdict = check_mc_initial(model, labels, phi)
    else:
        sat, verdict = check_mc(model, labels, phi), None
    out = ["sat: " + " ".join(s for s in model.states if s in sat)]
    if verdict is not None:
        out.append(f"init: {'true' if verdict else 'false'}")
    return out


def cmd_reduce(args) -> List[str]:
    pfa = _load(args.model, PFA)
    word = parse_word(args.word, pfa.alphabet)
    inst = build_reduction_instance(pfa, word, _rational(args.p))
    out_dir = args.out_dir or args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    files = {
        "instance.mdp": serialize_model(inst.mdp),
        "instance.labels": serialize_labels(inst.nu, inst.mdp.states),
        "instance.formula": serialize(inst.formula) + "\n",
        "instance.scheduler": serialize_scheduler(inst.scheduler, inst.mdp.states),
    }
    if args.to == "poca":
        poca = pfa_to_poca(pfa)
        problems = validate_poca(poca)
        if problems:
            raise SemanticError("; ".join(problems))
        files["instance.poca"] = serialize_model(poca)
    lines = []
    for name, text in files.items():
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        lines.append(f"wrote {path}")
    lines.append(f"acceptance={nx.format_fraction(inst.acceptance_probability)}")
    return lines


def _verify_one(lemma, pfa, word, args):
    if lemma == "31":
        return verify_lemma_3_1(pfa, word)
    if lemma == "32":
        return verify_lemma_3_2(pfa, word, args.depth)
    if lemma == "41":
        return verify_lemma_4_1(pfa, word)
    return block_matrix_check(pfa, word)


def cmd_verify(args) -> List[str]:
    if args.suite:
        instances = pfa_instances(args.seed, args.suite)
        if args.lemma == "32":
            instances = [(p, w) for p, w in instances if w]
    else:
        if args.model is None:
            raise SemanticError("verify needs a model file or --suite N")
        pfa = _load(args.model, PFA)
        instances = [(pfa, parse_word(args.word or "", pfa.alphabet))]
    lines = []
    mismatches = 0
    for pfa, word in instances:
        report = _verify_one(args.lemma, pfa, word, args)
        if args.suite:
            lines.append(report.to_line())
        else:
            lines.extend(report.lines())
        if not report.equal:
            mismatches += 1
            if args.out:
                lines.append(f"counterexample {write_counterexample(args.out, pfa, word, report)}")
    if args.suite:
        lines.append(f"instances={len(instances)} unequal={mismatches}")
    return lines


def cmd_empty_search(args) -> List[str]:
    pfa = _load(args.model, PFA)
    spec = CutPointSpec(_rational(args.cutpoint), args.strictness == "strict")
    witness = bounded_emptiness_search(pfa, spec, args.max_len)
    if witness is None:
        return [f"none up to {args.max_len}"]
    return [format_word(witness) if witness else '""']


def cmd_simulate(args) -> List[str]:
    poca = _load(args.model, POCA)
    hist = simulate_ocp(poca, args.steps, args.samples, args.seed)
    return format_histogram(hist).splitlines()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--depth", type=int, default=None, help="quotient depth bound for verify 32 (default |w|+2)")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--report", default=None, help="write a JSON run report to this path")
    common.add_argument("--timing", action="store_true", help="include wall time in the run report")

    parser = argparse.ArgumentParser(prog="probcheck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("accept", parents=[common], help="acceptance probability of a word")
    p.add_argument("model")
    p.add_argument("word")
    p.set_defaults(func=cmd_accept, inputs=["model"])

    p = sub.add_parser("check", parents=[common], help="check a PCTL formula on an mc or mdp")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--labels", default=None, help="label file (kind: labels)")
    p.set_defaults(func=cmd_check, inputs=["model", "labels"])

    p = sub.add_parser("reduce", parents=[common], help="write the model-checking instance for a word")
    p.add_argument("model")
    p.add_argument("word")
    p.add_argument("p")
    p.add_argument("out_dir", nargs="?")
    p.add_argument("--to", choices=["mdp", "poca"], default="mdp")
    p.set_defaults(func=cmd_reduce, inputs=["model"])

    p = sub.add_parser("verify", parents=[common], help="compare both sides of a lemma exactly")
    p.add_argument("lemma", choices=["31", "32", "41", "block"])
    p.add_argument("model", nargs="?")
    p.add_argument("word", nargs="?")
    p.add_argument("--suite", type=int, default=0, help="run on N random instances instead")
    p.set_defaults(func=cmd_verify, inputs=["model"])

    p = sub.add_parser("empty-search", parents=[common], help="bounded search for a cut-point witness")
    p.add_argument("model")
    p.add_argument("cutpoint")
    p.add_argument("strictness", choices=["strict", "non-strict"])
    p.add_argument("max_len", type=int, help="cost grows as |alphabet|**max_len")
    p.set_defaults(func=cmd_empty_search, inputs=["model"])

    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo histogram of a one-counter process")
    p.add_argument("model")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.set_defaults(func=cmd_simulate, inputs=["model"])
    return parser


def _digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _write_report(args, argv, lines, elapsed):
    report = {
        "command": list(argv),
        "inputs": {
            getattr(args, k): _digest(getattr(args, k))
            for k in args.inputs
            if getattr(args, k, None) and os.path.isfile(getattr(args, k))
        },
        "results": lines,
    }
    if args.timing:
        report["elapsed_seconds"] = round(elapsed, 6)
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        lines = args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SemanticError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except ProbcheckError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    for line in lines:
        print(line)
    if args.report:
        _write_report(args, argv, lines, time.perf_counter() - start)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
