"""Command-line interface.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .cost_learn import LEARNERS, LearnerConfig
from .exceptions import DataError, LengthMismatch, MissingReference
from .io import LABEL, evaluate, load_model, parse_schema, read_conll, write_conll, write_model
from .tasks import (
    ChunkTask,
    FeatureConfig,
    LabeledSentence,
    MarkovLowerBoundSpec,
    SequenceLabelingTask,
    bio_label_set,
    chunk_types,
    kaariainen_simulation,
    make_task_instances,
    synth_generate,
)
from .theory import BoundInputs, theorem2_bound
from .training import ProgressLog, SearnConfig, bound_estimates, predict_outputs, searn_train

logger = logging.getLogger("searn")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
COST_MODE_FLAGS = {"approx": "approximation", "mc": "monte_carlo", "single": "single_sample"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _beta(text):
    if text in ("auto", "analytic"):
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, 'auto' or 'analytic', got {text!r}") from None
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError("beta must lie in (0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="searn", description="Search-based structured prediction.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("train", help="train a model on a CoNLL file")
    t.add_argument("--train", required=True, help="labeled CoNLL training file")
    t.add_argument("--task", choices=("sequence", "chunk"), default=None, help="default: chunk for --loss f1, else sequence")
    t.add_argument("--loss", choices=("hamming", "f1"), default=None)
    t.add_argument("--learner", choices=LEARNERS, default="perceptron")
    t.add_argument("--beta", type=_beta, default="auto")
    t.add_argument("--iterations", type=int, default=None)
    t.add_argument("--cost-mode", choices=tuple(COST_MODE_FLAGS), default="approx")
    t.add_argument("--mc-samples", type=int, default=1)
    t.add_argument("--beam", type=int, default=1)
    t.add_argument("--max-phrase", type=int, default=5)
    t.add_argument("--hash-bits", type=int, default=20)
    t.add_argument("--epochs", type=int, default=5)
    t.add_argument("--l2", type=float, default=1e-4)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--dev", default=None, help="labeled CoNLL dev file")
    t.add_argument("--schema", default=None, help="column names, e.g. token,pos,label")
    t.add_argument("--log", default=None, help="write JSON-lines progress records here")
    t.add_argument("--out", required=True, help="model file to write")

    pr = sub.add_parser("predict", help="label a CoNLL file with a trained model")
    pr.add_argument("--model", required=True)
    pr.add_argument("--in", dest="inp", required=True)
    pr.add_argument("--out", required=True)
    pr.add_argument("--seed", type=int, default=0)

    ev = sub.add_parser("eval", help="compare predicted labels to gold labels")
    ev.add_argument("--gold", required=True)
    ev.add_argument("--pred", required=True)
    ev.add_argument("--loss", choices=("hamming", "f1"), default="hamming")

    sim = sub.add_parser("simulate-lowerbound", help="self-conditioned error propagation simulation")
    sim.add_argument("--epsilon", type=float, required=True)
    sim.add_argument("--T", type=int, required=True)
    sim.add_argument("--trials", type=int, default=10000)
    sim.add_argument("--seed", type=int, default=0)

    br = sub.add_parser("bound-report", help="iteration bound from a training log")
    br.add_argument("--model-log", required=True)

    g = sub.add_parser("generate", help="write a synthetic labeled CoNLL file")
    g.add_argument("--kind", choices=("separable_sequence", "noisy_history", "chunked"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--length", type=int, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    return p


# -- subcommands --------------------------------------------------------------


def _read_labeled(path, schema, what):
    data = read_conll(path, schema)
    if not isinstance(data[0], LabeledSentence):
        raise DataError(f"{what} file {path} has no label column")
    return data


def _schema_of(path, schema):
    if schema is not None:
        return parse_schema(schema)
    from .io import default_schema

    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                return default_schema(len(line.split()))
    return None


def _make_task(args, data):
    kind = args.task or ("chunk" if args.loss == "f1" else "sequence")
    loss = args.loss or ("f1" if kind == "chunk" else "hamming")
    feats = FeatureConfig(hash_bits=args.hash_bits)
    label_seqs = [d.labels for d in data]
    if kind == "chunk":
        if loss != "f1":
            raise UsageError("the chunk task is scored by F1; use --loss f1")
        return ChunkTask(chunk_types(label_seqs), args.max_phrase, feats)
    if loss == "f1":
        return SequenceLabelingTask(bio_label_set(chunk_types(label_seqs)), "f1", feats)
    return SequenceLabelingTask(sorted({lab for seq in label_seqs for lab in seq}), "hamming", feats)


def cmd_train(args, out):
    if args.iterations is not None and args.iterations < 1:
        raise UsageError("--iterations must be positive")
    schema = _schema_of(args.train, args.schema)
    if schema is None or schema[-1] != LABEL:
        raise UsageError("training needs a label column; pass --schema ending in 'label'")
    train = _read_labeled(args.train, schema, "training")
    dev = _read_labeled(args.dev, schema, "dev") if args.dev else None
    task = _make_task(args, train + (dev or []))
    beta = args.beta
    if beta == "analytic":
        beta_kw = {"beta_mode": "analytic", "max_iterations": args.iterations}
    elif beta == "auto":
        beta_kw = {"beta_mode": "auto", "max_iterations": args.iterations or 10}
    else:
        beta_kw = {"beta_mode": "fixed", "beta": beta, "max_iterations": args.iterations or 10}
    try:
        config = SearnConfig(
            cost_mode=COST_MODE_FLAGS[args.cost_mode],
            sample_count=args.mc_samples,
            beam_width=args.beam,
            seed=args.seed,
            learner=LearnerConfig(epochs=args.epochs, l2=args.l2),
            **beta_kw,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    instances = make_task_instances(task, train)
    dev_instances = make_task_instances(task, dev) if dev else None
    log_fh = open(args.log, "w", encoding="utf-8") if args.log else None
    try:
        log = ProgressLog(log_fh)
        policy, reports = searn_train(instances, task, args.learner, config, dev=dev_instances, log=log)
        est = bound_estimates(instances, task, reports)
        log.emit("summary", **est)
    finally:
        if log_fh is not None:
            log_fh.close()
    write_model(policy, task, args.out, beam_width=args.beam, meta={"schema": list(schema)})
    last = reports[-1]
    print(
        f"trained {len(reports)} iterations; cs_loss={last.cs_loss:.6f} "
        f"pi_weight={last.pi_weight:.6g} model={args.out}",
        file=out,
    )
    return EXIT_OK


def cmd_predict(args, out):
    model = load_model(args.model)
    schema = tuple(model.meta.get("schema", ("token", LABEL)))
    in_schema = _schema_of(args.inp, None)
    if in_schema is None:
        raise DataError(f"{args.inp}: no sentences")
    base = schema[:-1] if schema[-1] == LABEL else schema
    # accept the input with or without its (ignored) label column
    with open(args.inp, encoding="utf-8") as fh:
        width = next(len(line.split()) for line in fh if line.strip())
    if width == len(base) + 1:
        read_schema = base + (LABEL,)
    elif width == len(base):
        read_schema = base
    else:
        raise DataError(f"{args.inp}: expected {len(base)} or {len(base) + 1} columns, found {width}")
    data = read_conll(args.inp, read_schema)
    sentences = [d.sentence if isinstance(d, LabeledSentence) else d for d in data]
    instances = make_task_instances(model.task, sentences)
    preds = predict_outputs(model.policy, instances, model.task, model.beam_width, args.seed)
    write_conll(args.out, [LabeledSentence(s, p) for s, p in zip(sentences, preds)], base + (LABEL,))
    print(f"labeled {len(sentences)} sentences -> {args.out}", file=out)
    return EXIT_OK


def cmd_eval(args, out):
    gold = _read_labeled(args.gold, None, "gold")
    pred = _read_labeled(args.pred, None, "prediction")
    report = evaluate(gold, pred, args.loss)
    print(json.dumps(report.as_dict(), sort_keys=True), file=out)
    return EXIT_OK


def cmd_simulate(args, out):
    try:
        spec = MarkovLowerBoundSpec(args.epsilon, args.T, args.trials)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    measured, formula = kaariainen_simulation(spec, args.seed)
    rel = abs(measured - formula) / formula if formula else abs(measured)
    print(f"formula_value {formula:.6f}", file=out)
    print(f"measured_mean {measured:.6f}", file=out)
    print(f"relative_difference {rel:.6f}", file=out)
    return EXIT_OK


def cmd_bound_report(args, out):
    summary = None
    with open(args.model_log, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                raise DataError(f"{args.model_log}:{n}: not a JSON record") from None
            if rec.get("event") == "summary":
                summary = rec
    if summary is None:
        raise DataError(f"{args.model_log}: no summary record")
    try:
        inputs = BoundInputs(int(summary["T"]), summary["c_max"], summary["L_pi"], summary["ell_avg"])
        bound = theorem2_bound(inputs)
    except (KeyError, ValueError) as exc:
        raise DataError(f"{args.model_log}: cannot compute bound: {exc}") from None
    rec = {
        "T": inputs.T,
        "c_max": inputs.c_max,
        "L_pi": inputs.L_pi,
        "ell_avg": inputs.ell_avg,
        "iterations": summary.get("iterations"),
        "bound": bound,
    }
    print(json.dumps(rec, sort_keys=True), file=out)
    return EXIT_OK


def cmd_generate(args, out):
    params = {"length": args.length} if args.length else {}
    if args.n < 1:
        raise UsageError("--n must be positive")
    data = synth_generate(args.kind, dict(n=args.n, **params), args.seed)
    write_conll(args.out, data, ("token", LABEL))
    print(f"wrote {len(data)} sentences -> {args.out}", file=out)
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "simulate-lowerbound": cmd_simulate,
    "bound-report": cmd_bound_report,
    "generate": cmd_generate,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"searn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, LengthMismatch, MissingReference, OSError) as exc:
        print(f"searn {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        # bad labels or values inside an otherwise well-formed file
        print(f"searn {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
