"""Command-line interface: ``codemix-lid <command> [options]``."""

import argparse
import configparser
import json
import logging
import os
import sys

import numpy as np

from . import baseline, corpus, ensemble, neural
from .corpus import Label
from .decision import apply_threshold, fit_stacker, fit_threshold, round_predict, ThresholdRule
from .encoder import Scheme, encode, oov_count
from .errors import (DegenerateInputError, InvalidInputError, LibraryParseError, LibraryValidationError,
                     LidError, ModelFormatError, NumericError, SchemeMismatchError, SizingError)
from .metrics import ConfusionMatrix, compute_metrics, confusion, export_scatter, report_dict, results_table
from .phonelib import default_library, load_library_file

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_MISMATCH = 4
EXIT_FORMAT = 5
EXIT_DATA = 6

log = logging.getLogger("codemix_lid")


class UsageError(LidError):
    pass


def _exit_code(exc):
    if isinstance(exc, UsageError):
        return EXIT_USAGE
    if isinstance(exc, OSError):
        return EXIT_IO
    if isinstance(exc, SchemeMismatchError):
        return EXIT_MISMATCH
    if isinstance(exc, (ModelFormatError, LibraryParseError, LibraryValidationError, InvalidInputError)):
        return EXIT_FORMAT
    if isinstance(exc, (SizingError, DegenerateInputError, NumericError)):
        return EXIT_DATA
    return 1


def _counts(text):
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected TRAIN,DEV,TEST counts, got {text!r}") from None
    if len(vals) != 3 or min(vals) < 0:
        raise argparse.ArgumentTypeError(f"expected three non-negative counts, got {text!r}")
    return vals


def _hidden(text):
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected H1,H2, got {text!r}") from None
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two hidden sizes, got {text!r}")
    return vals


def build_parser():
    p = argparse.ArgumentParser(prog="codemix-lid", description="Word-level BN/EN language identification.")
    p.add_argument("--config", help="key = value settings file; command-line flags override it")
    p.add_argument("--run-manifest", help="write the effective settings of this run as JSON here")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def lib_flag(sp):
        sp.add_argument("--phonelib", help="phonetic library file (default: built-in table)")

    sp = sub.add_parser("synth", help="generate a seeded synthetic BN/EN word list pair")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--n", type=int, default=1000, help="words per label")
    sp.add_argument("--bn-out", required=True)
    sp.add_argument("--en-out", required=True)
    lib_flag(sp)

    sp = sub.add_parser("split", help="normalize word lists and write a train/dev/test manifest")
    sp.add_argument("--bn", required=True, help="BN word list, one word per line")
    sp.add_argument("--en", required=True, help="EN word list, one word per line")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--counts", type=_counts, default=(6632, 300, 700), help="TRAIN,DEV,TEST per label")
    sp.add_argument("--out", required=True, help="manifest TSV: word, label, split")

    sp = sub.add_parser("encode", help="encode words (one per line) as index sequences")
    sp.add_argument("input", nargs="?", help="word file (default: standard input)")
    sp.add_argument("--scheme", choices=[s.value for s in Scheme], default="phonetic")
    lib_flag(sp)

    sp = sub.add_parser("stats", help="root-phone frequency and OOV count of a word list")
    sp.add_argument("input", help="word file, one word per line")
    sp.add_argument("--out", help="frequency CSV (slot,phone,frequency)")
    lib_flag(sp)

    sp = sub.add_parser("train", help="train an LSTM or the SVM baseline on a manifest")
    sp.add_argument("--model", choices=["lstm", "svm"], default="lstm")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--scheme", choices=[s.value for s in Scheme], default="char")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--epochs", type=int, help="default 500 (LSTM) / 50 (SVM)")
    sp.add_argument("--batch-size", type=int, default=1658)
    sp.add_argument("--lr", type=float, default=0.001)
    sp.add_argument("--hidden", type=_hidden, help="H1,H2 (default 35,25 char / 15,40 phonetic)")
    sp.add_argument("--svm-lambda", type=float, default=1e-4)
    sp.add_argument("--out", required=True)
    lib_flag(sp)

    sp = sub.add_parser("ensemble", help="bundle a char and a phonetic model into an ensemble file")
    sp.add_argument("--char-model", required=True)
    sp.add_argument("--phonetic-model", required=True)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("tune", help="fit a decision rule on the dev split")
    sp.add_argument("--method", choices=["threshold", "stack", "mean-threshold"], required=True)
    sp.add_argument("--model", required=True, help="LSTM model (threshold) or ensemble file (stack, mean-threshold)")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--out", help="output file (default: update --model in place)")
    sp.add_argument("--scatter-out", help="CSV of dev fuzzy values (index,score,label)")
    sp.add_argument("--seed", type=int, default=0)
    lib_flag(sp)

    sp = sub.add_parser("evaluate", help="metrics table for a model on a split, or for a given confusion matrix")
    sp.add_argument("--model")
    sp.add_argument("--manifest")
    sp.add_argument("--split", choices=["train", "dev", "test"], default="test")
    sp.add_argument("--method", choices=["round", "threshold", "stack", "mean-threshold", "svm"])
    sp.add_argument("--cm", type=ConfusionMatrix.parse, help="BN_BN,BN_EN,EN_BN,EN_EN counts (true x predicted)")
    sp.add_argument("--name", help="row name in the results table")
    sp.add_argument("--positive-class", choices=["en", "bn", "EN", "BN"], default="en")
    sp.add_argument("--cm-out", help="write the confusion matrix as JSON")
    sp.add_argument("--results-out", help="write metrics as JSON keyed by model name")
    sp.add_argument("--scatter-out", help="CSV of fuzzy values on the split")
    lib_flag(sp)

    sp = sub.add_parser("predict", help="label words read from standard input")
    sp.add_argument("--model", required=True)
    sp.add_argument("--method", choices=["round", "threshold", "stack", "mean-threshold", "svm"])
    lib_flag(sp)

    sp = sub.add_parser("pipeline", help="run the full synthetic experiment end to end")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--n", type=int, default=1000, help="synthetic words per label")
    sp.add_argument("--counts", type=_counts, default=(700, 100, 200))
    sp.add_argument("--epochs", type=int, default=500)
    sp.add_argument("--batch-size", type=int, default=1658)
    sp.add_argument("--lr", type=float, default=0.01)
    sp.add_argument("--out-dir", required=True)
    lib_flag(sp)
    return p


def read_config(path):
    """``key = value`` lines (``#`` comments); keys match long flag names."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    with open(path, encoding="utf-8") as fh:
        cp.read_string("[run]\n" + fh.read(), source=path)
    return {k.replace("-", "_"): v for k, v in cp["run"].items()}


def _command_of(argv):
    return next((a for a in argv if a in COMMANDS), None)


def _apply_config(parser, command, values):
    """Install config values as defaults of ``command``'s subparser."""
    sub = parser._subparsers._group_actions[0].choices[command]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        a = actions.get(key)
        if a is None or key == "help":
            raise UsageError(f"unknown config key {key!r} for command {command}")
        if a.nargs == 0:
            defaults[key] = raw.strip().lower() in ("1", "true", "yes", "on")
        else:
            try:
                defaults[key] = a.type(raw) if a.type else raw
            except (argparse.ArgumentTypeError, ValueError, LidError) as exc:
                raise UsageError(f"config key {key}: {exc}") from None
            if a.choices and defaults[key] not in a.choices:
                raise UsageError(f"config key {key}: {raw!r} not in {sorted(a.choices)}")
        a.required = False
    sub.set_defaults(**defaults)


def _require(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required for {args.command}")


def _check_inputs(*paths):
    for path in paths:
        if path is not None and not os.path.isfile(path):
            raise FileNotFoundError(f"no such file: {path}")


def _library(args):
    path = getattr(args, "phonelib", None)
    if path is None:
        return default_library()
    _check_inputs(path)
    return load_library_file(path)


def _read_lines(path):
    fh = open(path, encoding="utf-8") if path else sys.stdin
    try:
        return [line.strip() for line in fh if line.strip()]
    finally:
        if path:
            fh.close()


def load_any(path):
    """``(kind, model)`` where kind is ``lstm``, ``svm`` or ``ensemble``."""
    _check_inputs(path)
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: corrupt model file ({exc})") from exc
    fmt = d.get("format") if isinstance(d, dict) else None
    if fmt == neural.FORMAT:
        return "lstm", neural.from_dict(d)
    if fmt == baseline.FORMAT:
        return "svm", baseline.load_svm(path)
    if fmt == ensemble.FORMAT:
        return "ensemble", ensemble.from_dict(d)
    raise ModelFormatError(f"{path}: unrecognized model format {fmt!r}")


def _default_method(kind, model):
    if kind == "svm":
        return "svm"
    if kind == "lstm":
        return "threshold" if "theta" in model.decision else "round"
    return "mean-threshold" if model.mean_rule is not None else "stack"


def predict_words(kind, model, words, method, lib):
    """``(labels, scores)`` for normalized words."""
    if kind == "svm":
        if method != "svm":
            raise SchemeMismatchError(f"an SVM model cannot use method {method!r}")
        out = [baseline.predict_svm(model, w) for w in words]
        return [o[0] for o in out], np.array([o[1] for o in out])
    if kind == "lstm":
        scores = neural.score_words(model, words, lib)
        if method == "round":
            return [round_predict(float(s)) for s in scores], scores
        if method == "threshold":
            if "theta" not in model.decision:
                raise ModelFormatError("model has no tuned threshold; run tune --method threshold")
            rule = ThresholdRule(float(model.decision["theta"]))
            return [apply_threshold(rule, float(s)) for s in scores], scores
        raise SchemeMismatchError(f"a single LSTM model cannot use method {method!r}")
    if method not in ("stack", "mean-threshold"):
        raise SchemeMismatchError(f"an ensemble cannot use method {method!r}")
    return model.predict(words, method, lib)


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def cmd_synth(args, out):
    _require(args, "seed")
    words = corpus.generate_synthetic(args.seed, args.n, _library(args))
    for label, path in ((Label.BN, args.bn_out), (Label.EN, args.en_out)):
        with open(path, "w", encoding="utf-8") as fh:
            fh.writelines(lw.word + "\n" for lw in words if lw.label is label)
    out.write(f"wrote {args.n} BN words to {args.bn_out} and {args.n} EN words to {args.en_out}\n")


def cmd_split(args, out):
    _require(args, "seed")
    _check_inputs(args.bn, args.en)
    loaded = corpus.load_corpus(args.bn, args.en)
    split = corpus.split_corpus(loaded.words, args.seed, args.counts)
    corpus.write_manifest(split, args.out)
    rej = ", ".join(f"{k.value}={v}" for k, v in sorted(loaded.rejects.items())) or "none"
    out.write(f"kept {len(loaded.words)} words, rejected {loaded.n_rejected} ({rej})\n")
    for name, c in split.counts.items():
        out.write(f"{name}: BN {c['BN']}  EN {c['EN']}\n")


def cmd_encode(args, out):
    _check_inputs(args.input)
    lib = _library(args)
    for raw in _read_lines(args.input):
        w, why = corpus.check_word(raw)
        if why is not None:
            log.warning("skipped %r: %s", raw, why.value)
            continue
        enc = encode(w, args.scheme, lib)
        out.write(f"{raw}\t{','.join(map(str, enc.indices))}\n")


def cmd_stats(args, out):
    _check_inputs(args.input)
    lib = _library(args)
    words = [w for w in (corpus.normalize_word(r) for r in _read_lines(args.input)) if w]
    freq = corpus.root_phone_frequency(words, lib)
    out.write(f"words: {len(words)}  oov (35) emitted: {oov_count(words, lib)}\n")
    if args.out:
        corpus.write_frequency_csv(freq, args.out, lib)
        out.write(f"wrote {args.out}\n")
    else:
        for k, f in enumerate(freq):
            slot = lib.oov_index if k == len(freq) - 1 else k + 1
            out.write(f"{slot:>3} {lib.root_for_index(slot):<4} {f:.6f}\n")


def cmd_train(args, out):
    _require(args, "seed")
    _check_inputs(args.manifest)
    lib = _library(args)
    split = corpus.read_manifest(args.manifest)
    settings = {}
    if args.model == "svm":
        epochs = args.epochs or 50
        model = baseline.train_svm(split.train + split.dev, args.svm_lambda, epochs, args.seed)
        baseline.save_svm(model, args.out)
        acc = np.mean([baseline.predict_svm(model, lw.word)[0] is lw.label for lw in split.train + split.dev])
        settings = {"model": "svm", "lambda": args.svm_lambda, "epochs": epochs, "seed": args.seed}
        out.write(f"svm: {len(model.vocab)} n-gram features, training accuracy {100 * acc:.2f}%\n")
    else:
        cfg = neural.NetworkConfig(scheme=args.scheme, hidden=args.hidden, epochs=args.epochs or 500,
                                   batch_size=args.batch_size, lr=args.lr, seed=args.seed)
        res = neural.train(cfg, split.train, split.dev, lib=lib)
        neural.save_model(res.network, args.out)
        settings = {"model": "lstm", **cfg.to_dict()}
        out.write(f"{cfg.scheme.value} lstm {cfg.hidden}: loss {res.loss_history[0]:.4f} -> "
                  f"{res.loss_history[-1]:.4f} over {cfg.epochs} epochs\n")
    _write_json(args.out + ".run.json", {"command": "train", "manifest": args.manifest, **settings})
    out.write(f"wrote {args.out}\n")


def cmd_ensemble(args, out):
    char = neural.load_model(_checked(args.char_model), scheme="char")
    phon = neural.load_model(_checked(args.phonetic_model), scheme="phonetic")
    ensemble.save_ensemble(ensemble.Ensemble(char, phon), args.out)
    out.write(f"wrote {args.out}\n")


def _checked(path):
    _check_inputs(path)
    return path


def cmd_tune(args, out):
    _check_inputs(args.manifest)
    lib = _library(args)
    kind, model = load_any(args.model)
    dev = corpus.read_manifest(args.manifest).dev
    truth = [lw.label for lw in dev]
    dest = args.out or args.model
    if args.method == "threshold":
        if kind != "lstm":
            raise SchemeMismatchError("--method threshold needs a single LSTM model")
        scores = neural.score_words(model, dev, lib)
        rule, acc = fit_threshold(scores, truth)
        model.decision = {"method": "threshold", "theta": rule.theta}
        neural.save_model(model, dest)
        out.write(f"theta = {rule.theta:.2f} (score <= theta is BN), dev accuracy {100 * acc:.2f}%\n")
    else:
        if kind != "ensemble":
            raise SchemeMismatchError(f"--method {args.method} needs an ensemble file")
        pairs = model.pair_scores(dev, lib)
        if args.method == "stack":
            model.stacker = fit_stacker(pairs, truth, seed=args.seed)
            labels, scores = model.predict(dev, "stack", lib)
            acc = np.mean([a is b for a, b in zip(labels, truth)])
            s = model.stacker
            out.write(f"stacker w_char={s.w1:.4f} w_phon={s.w2:.4f} b={s.b:.4f}, dev accuracy {100 * acc:.2f}%\n")
        else:
            scores = pairs.mean(axis=1)
            model.mean_rule, acc = fit_threshold(scores, truth)
            out.write(f"mean theta = {model.mean_rule.theta:.2f}, dev accuracy {100 * acc:.2f}%\n")
        ensemble.save_ensemble(model, dest)
    if args.scatter_out:
        export_scatter(scores, truth, args.scatter_out)
    out.write(f"wrote {dest}\n")


def cmd_evaluate(args, out):
    positive = Label.parse(args.positive_class)
    if args.cm is not None:
        cm = args.cm
        name = args.name or "confusion"
    else:
        _require(args, "model", "manifest")
        _check_inputs(args.manifest)
        lib = _library(args)
        kind, model = load_any(args.model)
        method = args.method or _default_method(kind, model)
        part = getattr(corpus.read_manifest(args.manifest), args.split)
        if not part:
            raise SizingError(f"split {args.split!r} is empty")
        truth = [lw.label for lw in part]
        preds, scores = predict_words(kind, model, [lw.word for lw in part], method, lib)
        cm = confusion(preds, truth)
        name = args.name or f"{os.path.basename(args.model)}:{method}:{args.split}"
        if args.scatter_out:
            export_scatter(scores, truth, args.scatter_out)
    report = compute_metrics(cm, positive)
    out.write(results_table([(name, report)]))
    out.write(f"confusion (true x pred)  BN->BN {cm.bn_bn}  BN->EN {cm.bn_en}  EN->BN {cm.en_bn}  EN->EN {cm.en_en}\n")
    if args.cm_out:
        _write_json(args.cm_out, {"bn_bn": cm.bn_bn, "bn_en": cm.bn_en, "en_bn": cm.en_bn, "en_en": cm.en_en})
    if args.results_out:
        _write_json(args.results_out, {name: report_dict(report)})


def cmd_predict(args, out):
    lib = _library(args)
    kind, model = load_any(args.model)
    method = args.method or _default_method(kind, model)
    words = []
    for raw in _read_lines(None):
        w, why = corpus.check_word(raw)
        if why is not None:
            log.warning("skipped %r: %s", raw, why.value)
        else:
            words.append(w)
    if not words:
        return
    labels, scores = predict_words(kind, model, words, method, lib)
    for w, lab, s in zip(words, labels, scores):
        out.write(f"{w}\t{lab.value}\t{float(s):.6f}\n")


def cmd_pipeline(args, out):
    from .pipeline import run_synthetic
    _require(args, "seed")
    res = run_synthetic(seed=args.seed, n_per_label=args.n, counts=args.counts, epochs=args.epochs,
                        batch_size=args.batch_size, lr=args.lr, lib=_library(args), out_dir=args.out_dir)
    out.write(res.table())
    th = res.thresholds
    out.write(f"thresholds: char {th['char']:.2f}  phonetic {th['phonetic']:.2f}  mean {th['mean']:.2f}\n")
    out.write(f"finished in {res.seconds:.1f}s; outputs in {args.out_dir}\n")


COMMANDS = {
    "synth": cmd_synth, "split": cmd_split, "encode": cmd_encode, "stats": cmd_stats,
    "train": cmd_train, "ensemble": cmd_ensemble, "tune": cmd_tune, "evaluate": cmd_evaluate,
    "predict": cmd_predict, "pipeline": cmd_pipeline,
}


def main(argv=None, out=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    config_path = pre.parse_known_args(argv)[0].config
    command = _command_of(argv)
    try:
        if config_path and command:
            _check_inputs(config_path)
            _apply_config(parser, command, read_config(config_path))
    except (LidError, OSError) as exc:
        print(f"codemix-lid: error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.run_manifest:
            _write_json(args.run_manifest, {k: (list(v) if isinstance(v, tuple) else v)
                                            for k, v in vars(args).items()})
        COMMANDS[args.command](args, out)
    except (LidError, OSError) as exc:
        print(f"codemix-lid {args.command}: error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
