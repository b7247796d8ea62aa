"""boundkit command line: train / encode / stats / ppl / morph / report / run.

Exit codes: 0 success, 1 usage error, 2 data error (bad files, bad corpus,
bad config), 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bigram as bigram_lm
from . import morph as morph_eval
from .errors import BoundkitError, DataError, InvariantError
from .experiment import (build_config, load_config_file, render_report,
                         run_experiment)
from .kernels import BACKEND
from .pretokenize import PretokMode
from .segmenter import Segmenter
from .stats import encode_corpus, stats_report
from .trainer import train_detailed
from .vocab import MarkingScheme, TrainerConfig, load_vocab, save_vocab

logger = logging.getLogger(__name__)


def _read_lines(path: str) -> list[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _read_token_lines(path: str) -> list[list[str]]:
    return [line.split() for line in _read_lines(path)]


def _write_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    if path is None or path == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n", encoding="utf-8")


def _cmd_train(args) -> int:
    config = TrainerConfig(
        target_vocab_size=args.vocab_size,
        scheme=MarkingScheme.parse(args.scheme),
        pretok_mode=PretokMode.parse(args.pretok),
        shrink_factor=args.shrink,
        seed_max_size=args.seed_max_size,
        seed_max_piece_len=args.seed_max_len,
        em_iters_per_round=args.em_iters,
        seed_threshold=args.seed_threshold,
        threads=args.threads,
    )
    result = train_detailed(_read_lines(args.input), config)
    save_vocab(result.vocabulary, args.model_out)
    logger.info("trained %d pieces (%d required, seed %d) in %d rounds -> %s",
                len(result.vocabulary), result.required_count,
                result.seed_size, len(result.rounds), args.model_out)
    if not result.reached_target:
        logger.warning("target size %d not reached; stopped at %d pieces",
                       config.target_vocab_size, len(result.vocabulary))
    return 0


def _cmd_encode(args) -> int:
    vocab = load_vocab(args.model)
    segmenter = Segmenter(vocab)
    mode = PretokMode.parse(args.pretok)
    lines = _read_lines(args.input)
    with open(args.output, "w", encoding="utf-8", newline="\n") as sink:
        for line in lines:
            sink.write(" ".join(segmenter.encode_line(line, mode)) + "\n")
    return 0


def _cmd_stats(args) -> int:
    vocab = load_vocab(args.model)
    segmenter = Segmenter(vocab)
    mode = PretokMode.parse(args.pretok)
    counts, word_count, _ = encode_corpus(segmenter, _read_lines(args.corpus),
                                          mode)
    report = stats_report(Path(args.model).stem, Path(args.corpus).stem,
                          vocab, counts, word_count)
    payload = report.to_dict()
    payload["config"] = {
        "model": args.model,
        "corpus": args.corpus,
        "pretok": mode.value,
        "scheme": vocab.scheme.value,
        "entropy_log_base": 2,
        "word_count_denominator": "words consumed by the tokenizer "
                                  "(post-pretokenization)",
        "kernel_backend": BACKEND,
    }
    _write_json(payload, args.out)
    return 0


def _cmd_ppl(args) -> int:
    train_tokens = _read_token_lines(args.train_tokens)
    eval_tokens = _read_token_lines(args.eval_tokens)
    model = bigram_lm.fit(train_tokens, args.epsilon)
    ppl = bigram_lm.perplexity(model, eval_tokens)
    payload = {
        "perplexity": ppl,
        "epsilon": args.epsilon,
        "bigram_type_count": model.vocab_size,
        "uniform_perplexity": bigram_lm.uniform_perplexity(model),
        "predicted_tokens": sum(len(toks) + 1 for toks in eval_tokens),
        "config": {
            "train_tokens": args.train_tokens,
            "eval_tokens": args.eval_tokens,
            "framing": [bigram_lm.BOS, bigram_lm.EOS],
            "unknown_type": bigram_lm.UNK2,
            "normalization": "per piece token",
        },
    }
    _write_json(payload, args.out)
    return 0


def _cmd_morph(args) -> int:
    vocab_init = load_vocab(args.init_model)
    vocab_fin = load_vocab(args.fin_model)
    lexicon = morph_eval.load_lexicon(args.lexicon, args.fold_case)
    records = morph_eval.build_agreement_table(vocab_init, vocab_fin, lexicon,
                                               args.fold_case)
    cov_init = morph_eval.coverage(vocab_init, lexicon, args.fold_case)
    cov_fin = morph_eval.coverage(vocab_fin, lexicon, args.fold_case)
    union = morph_eval.union_coverage(vocab_init, vocab_fin, lexicon,
                                      args.fold_case)
    exclusive = morph_eval.exclusive_matches(vocab_init, vocab_fin, lexicon,
                                             args.fold_case)
    regression = morph_eval.ols(records)
    histogram = {0: 0, 1: 0, 2: 0}
    for record in records:
        histogram[record.agreement] += 1
    payload = {
        "lexicon_size": len(lexicon),
        "coverage_init": {"count": cov_init.count, "fraction": cov_init.fraction},
        "coverage_fin": {"count": cov_fin.count, "fraction": cov_fin.fraction},
        "union_coverage": union,
        "exclusive_only_init": {k: list(v) for k, v in exclusive.only_a.items()},
        "exclusive_only_fin": {k: list(v) for k, v in exclusive.only_b.items()},
        "agreement_histogram": {str(k): v for k, v in histogram.items()},
        "regression": regression.to_dict(),
        "config": {
            "init_model": args.init_model,
            "fin_model": args.fin_model,
            "lexicon": args.lexicon,
            "fold_case": args.fold_case,
            "score_aggregation": "max over pieces sharing a bare string",
            "regression_intercept": True,
        },
    }
    _write_json(payload, args.out)
    if args.export_scores:
        morph_eval.export_score_distributions(records, args.export_scores)
    return 0


def _cmd_report(args) -> int:
    try:
        bundle = json.loads(Path(args.bundle).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read bundle {args.bundle}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"bad bundle JSON {args.bundle}: {exc}") from exc
    text = render_report(bundle)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def _cmd_run(args) -> int:
    file_values = load_config_file(Path(args.config)) if args.config else {}
    overrides = {
        "train_corpus": Path(args.train_corpus) if args.train_corpus else None,
        "indomain_corpus": Path(args.indomain_corpus) if args.indomain_corpus else None,
        "ood_corpus": Path(args.ood_corpus) if args.ood_corpus else None,
        "lexicon": Path(args.lexicon) if args.lexicon else None,
        "vocab_size": args.vocab_size,
        "epsilon": args.epsilon,
        "threads": args.threads,
        "conditions": tuple(args.conditions.split(",")) if args.conditions else None,
    }
    config = build_config(file_values, overrides)
    bundle = run_experiment(config, Path(args.out_dir))
    print(render_report(bundle))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boundkit",
        description="Unigram-LM subword tokenizer toolkit with configurable "
                    "word-boundary marking.")
    parser.add_argument("--verbose", "-v", action="store_true",
                        help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a vocabulary")
    p.add_argument("--input", required=True)
    p.add_argument("--model-out", required=True)
    p.add_argument("--vocab-size", type=int, required=True)
    p.add_argument("--scheme", choices=["init", "fin"], default="init")
    p.add_argument("--pretok", choices=["raw", "rules", "external"],
                   default="raw")
    p.add_argument("--shrink", type=float, default=0.75)
    p.add_argument("--seed-max-len", type=int, default=16)
    p.add_argument("--seed-max-size", type=int, default=None)
    p.add_argument("--seed-threshold", type=int, default=2)
    p.add_argument("--em-iters", type=int, default=2)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("encode", help="segment a corpus with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--pretok", choices=["raw", "rules", "external"],
                   default="raw")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("stats", help="corpus statistics for one model")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--pretok", choices=["raw", "rules", "external"],
                   default="raw")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("ppl", help="bigram perplexity over token files")
    p.add_argument("--train-tokens", required=True)
    p.add_argument("--eval-tokens", required=True)
    p.add_argument("--epsilon", type=float, default=bigram_lm.DEFAULT_EPSILON)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_ppl)

    p = sub.add_parser("morph", help="morpheme recovery for an init/fin pair")
    p.add_argument("--init-model", required=True)
    p.add_argument("--fin-model", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--export-scores", default=None)
    p.add_argument("--fold-case", action="store_true")
    p.set_defaults(func=_cmd_morph)

    p = sub.add_parser("report", help="render a saved report bundle as text")
    p.add_argument("--bundle", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("run", help="run the full multi-condition experiment")
    p.add_argument("--config", default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--train-corpus", default=None)
    p.add_argument("--indomain-corpus", default=None)
    p.add_argument("--ood-corpus", default=None)
    p.add_argument("--lexicon", default=None)
    p.add_argument("--vocab-size", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--conditions", default=None,
                   help="comma-separated condition ids, e.g. raw-init,raw-fin")
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DataError as exc:
        print(f"boundkit: error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"boundkit: internal error: {exc}", file=sys.stderr)
        return 3
    except BoundkitError as exc:
        print(f"boundkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
