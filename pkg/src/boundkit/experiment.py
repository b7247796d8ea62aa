"""Orchestration of the four-condition experiment.

Trains one vocabulary per (pretokenization, marking) condition, encodes the
training / in-domain / out-of-domain corpora with each, fits a bigram model
per condition on its own training tokens, scores perplexity everywhere,
runs the morpheme-recovery analysis per pretokenization family (pairing the
init and fin models), and writes a bundle of machine- and human-readable
reports.

Informational trend rows compare measure directions against the directions
these statistics typically show in large-corpus studies; they are logged,
never asserted, because directions are corpus-dependent.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import bigram as bigram_lm
from . import morph as morph_eval
from .errors import BoundkitError, DataError
from .kernels import BACKEND
from .pretokenize import PretokMode
from .segmenter import Segmenter
from .stats import (StatsReport, encode_corpus, length_histogram,
                    stats_report, type_entropy)
from .trainer import TrainResult, train_detailed
from .vocab import MarkingScheme, TrainerConfig, Vocabulary, save_vocab

logger = logging.getLogger(__name__)

CORPUS_IDS = ("training", "in-domain", "out-of-domain")

DEFAULT_CONDITIONS = ("raw-init", "raw-fin", "rules-init", "rules-fin")

_MODE_LABELS = {"raw": PretokMode.RAW, "rules": PretokMode.RULE_BASED,
                "external": PretokMode.EXTERNAL}


def parse_condition(condition_id: str) -> tuple[PretokMode, MarkingScheme]:
    """A condition id is '<pretok>-<scheme>', e.g. 'raw-init', 'rules-fin'."""
    head, sep, tail = condition_id.rpartition("-")
    if not sep or head not in _MODE_LABELS or tail not in ("init", "fin"):
        raise DataError(
            f"bad condition id {condition_id!r}; expected "
            f"(raw|rules|external)-(init|fin)")
    return _MODE_LABELS[head], MarkingScheme.parse(tail)


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one full experiment run."""

    train_corpus: Path
    indomain_corpus: Path
    ood_corpus: Path
    lexicon: Optional[Path] = None
    vocab_size: int = 4000
    epsilon: float = 0.005
    shrink_factor: float = 0.75
    seed_threshold: int = 2
    seed_max_piece_len: int = 16
    seed_max_size: Optional[int] = None
    em_iters_per_round: int = 2
    threads: int = 1
    conditions: tuple[str, ...] = DEFAULT_CONDITIONS

    def __post_init__(self):
        for condition in self.conditions:
            parse_condition(condition)

    def trainer_config(self, condition_id: str) -> TrainerConfig:
        mode, scheme = parse_condition(condition_id)
        return TrainerConfig(
            target_vocab_size=self.vocab_size,
            scheme=scheme,
            pretok_mode=mode,
            shrink_factor=self.shrink_factor,
            seed_max_size=self.seed_max_size,
            seed_max_piece_len=self.seed_max_piece_len,
            em_iters_per_round=self.em_iters_per_round,
            seed_threshold=self.seed_threshold,
            threads=self.threads,
        )

    def echo(self) -> dict:
        data = dataclasses.asdict(self)
        for key in ("train_corpus", "indomain_corpus", "ood_corpus", "lexicon"):
            if data[key] is not None:
                data[key] = str(data[key])
        data["conditions"] = list(self.conditions)
        data["kernel_backend"] = BACKEND
        data["entropy_log_base"] = 2
        data["bigram_framing"] = [bigram_lm.BOS, bigram_lm.EOS]
        data["bigram_unknown_type"] = bigram_lm.UNK2
        data["perplexity_normalization"] = "per piece token"
        data["agreement_score_aggregation"] = "max over pieces sharing a bare string"
        data["regression_intercept"] = True
        return data


_CONFIG_KEYS = {
    "train_corpus": Path, "indomain_corpus": Path, "ood_corpus": Path,
    "lexicon": Path, "vocab_size": int, "epsilon": float,
    "shrink_factor": float, "seed_threshold": int,
    "seed_max_piece_len": int, "seed_max_size": int,
    "em_iters_per_round": int, "threads": int, "conditions": None,
}


def load_config_file(path: Path) -> dict:
    """Flat 'key = value' file; '#' starts a comment; paths are resolved
    relative to the config file's directory."""
    base = Path(path).parent
    values: dict = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise DataError(f"{path}:{lineno}: unknown config key {key!r}")
        caster = _CONFIG_KEYS[key]
        if key == "conditions":
            values[key] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif caster is Path:
            candidate = Path(value)
            values[key] = candidate if candidate.is_absolute() else base / candidate
        else:
            try:
                values[key] = caster(value)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad value {value!r} for "
                                f"{key}") from None
    return values


def build_config(file_values: dict, overrides: dict) -> ExperimentConfig:
    """Materialize a config with precedence: overrides > file > defaults."""
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    missing = [k for k in ("train_corpus", "indomain_corpus", "ood_corpus")
               if k not in merged]
    if missing:
        raise DataError(f"missing corpus paths in config: {', '.join(missing)}")
    return ExperimentConfig(**merged)


def _read_lines(path: Path) -> list[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read corpus {path}: {exc}") from exc
    return text.splitlines()


def _stage(condition: str, stage: str, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except BoundkitError as exc:
        raise DataError(f"stage {stage!r} failed for condition "
                        f"{condition!r}: {exc}") from exc


def _train_log_dict(result: TrainResult) -> dict:
    return {
        "rounds": [
            {
                "round": log.round_index,
                "logliks": log.logliks,
                "size_before": log.size_before,
                "size_after": log.size_after,
                "prob_mass_after_prune": log.prob_mass_after_prune,
            }
            for log in result.rounds
        ],
        "final_logliks": result.final_logliks,
        "final_prob_mass": result.final_prob_mass,
        "seed_size": result.seed_size,
        "required_pieces": result.required_count,
        "reached_target": result.reached_target,
        "distinct_words": result.distinct_words,
        "total_words": result.total_words,
    }


def run_experiment(config: ExperimentConfig, out_dir: Path) -> dict:
    """Run every condition end to end; returns (and writes) the report bundle."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpora = {
        "training": _read_lines(config.train_corpus),
        "in-domain": _read_lines(config.indomain_corpus),
        "out-of-domain": _read_lines(config.ood_corpus),
    }
    lexicon = None
    if config.lexicon is not None:
        lexicon = morph_eval.load_lexicon(config.lexicon)

    bundle: dict = {"config": config.echo(), "conditions": {}, "morph": {},
                    "trends": []}
    vocabs: dict[str, Vocabulary] = {}

    for condition in config.conditions:
        mode, _ = parse_condition(condition)
        logger.info("training condition %s", condition)
        result = _stage(condition, "train", train_detailed,
                        corpora["training"], config.trainer_config(condition))
        vocab = result.vocabulary
        vocabs[condition] = vocab
        vocab_file = out_dir / f"{condition}.vocab"
        _stage(condition, "save-vocab", save_vocab, vocab, vocab_file)

        segmenter = Segmenter(vocab)
        token_lines = {}
        counts = {}
        word_counts = {}
        for corpus_id in CORPUS_IDS:
            counts[corpus_id], word_counts[corpus_id], token_lines[corpus_id] = \
                _stage(condition, f"encode-{corpus_id}", encode_corpus,
                       segmenter, corpora[corpus_id], mode)

        model = _stage(condition, "bigram-fit", bigram_lm.fit,
                       token_lines["training"], config.epsilon)
        cells = {}
        for corpus_id in CORPUS_IDS:
            ppl = _stage(condition, f"perplexity-{corpus_id}",
                         bigram_lm.perplexity, model, token_lines[corpus_id])
            cells[corpus_id] = stats_report(condition, corpus_id, vocab,
                                            counts[corpus_id],
                                            word_counts[corpus_id], ppl)

        histogram = length_histogram(vocab)
        bundle["conditions"][condition] = {
            "vocab_file": vocab_file.name,
            "vocab_size": len(vocab),
            "type_entropy_bits": type_entropy(vocab),
            "length_histogram": histogram.to_dict(),
            "bigram_type_count": model.vocab_size,
            "uniform_perplexity": bigram_lm.uniform_perplexity(model),
            "training_log": _train_log_dict(result),
            "cells": {cid: cells[cid].to_dict() for cid in CORPUS_IDS},
        }

    if lexicon is not None:
        for family in _families(config.conditions):
            init_id, fin_id = f"{family}-init", f"{family}-fin"
            records = _stage(family, "morph-agreement",
                             morph_eval.build_agreement_table,
                             vocabs[init_id], vocabs[fin_id], lexicon)
            cov_init = morph_eval.coverage(vocabs[init_id], lexicon)
            cov_fin = morph_eval.coverage(vocabs[fin_id], lexicon)
            union = morph_eval.union_coverage(vocabs[init_id], vocabs[fin_id],
                                              lexicon)
            exclusive = morph_eval.exclusive_matches(vocabs[init_id],
                                                     vocabs[fin_id], lexicon)
            regression = _stage(family, "morph-regression", morph_eval.ols,
                                records)
            scores_file = out_dir / f"scores-{family}.tsv"
            morph_eval.export_score_distributions(records, scores_file)
            agreement_histogram = {0: 0, 1: 0, 2: 0}
            for record in records:
                agreement_histogram[record.agreement] += 1
            bundle["morph"][family] = {
                "lexicon_size": len(lexicon),
                "coverage_init": {"count": cov_init.count,
                                  "fraction": cov_init.fraction},
                "coverage_fin": {"count": cov_fin.count,
                                 "fraction": cov_fin.fraction},
                "union_coverage": union,
                "exclusive_only_init": len(exclusive.only_a),
                "exclusive_only_fin": len(exclusive.only_b),
                "agreement_histogram": {str(k): v for k, v in
                                        agreement_histogram.items()},
                "regression": regression.to_dict(),
                "scores_file": scores_file.name,
            }

    bundle["trends"] = _trends(bundle)

    _write_table(bundle, out_dir / "table.tsv")
    _write_lengths(bundle, out_dir / "lengths.tsv")
    (out_dir / "report.json").write_text(
        json.dumps(bundle, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8")
    (out_dir / "report.txt").write_text(render_report(bundle) + "\n",
                                        encoding="utf-8")
    return bundle


def _families(conditions: tuple[str, ...]) -> list[str]:
    """Pretokenization families that have both an init and a fin condition."""
    labels = []
    for family in ("raw", "rules", "external"):
        if f"{family}-init" in conditions and f"{family}-fin" in conditions:
            labels.append(family)
    return labels


def _trend(bundle, ident, description, reference, lhs_path, rhs_path,
           direction):
    lhs = _dig(bundle, lhs_path)
    rhs = _dig(bundle, rhs_path)
    if lhs is None or rhs is None:
        return None
    holds = lhs < rhs if direction == "<" else lhs > rhs
    return {
        "id": ident,
        "description": description,
        "reference_direction": reference,
        "lhs": lhs,
        "rhs": rhs,
        "holds": holds,
    }


def _dig(bundle, path):
    node = bundle
    for key in path:
        if not isinstance(node, dict) or key not in node:
            return None
        node = node[key]
    return node


def _trends(bundle: dict) -> list[dict]:
    """Directional comparisons typically seen on large natural-language
    corpora; informational only."""
    rows = []
    for family in ("raw", "rules"):
        init_id, fin_id = f"{family}-init", f"{family}-fin"
        cell = ("conditions", init_id, "cells", "training")
        cell_f = ("conditions", fin_id, "cells", "training")
        better_ratio = "<" if family == "raw" else ">"
        rows.append(_trend(
            bundle, f"{family}-tokens-per-word",
            f"{family}: tokens/word on the training corpus, init vs fin",
            f"init {better_ratio} fin",
            cell + ("tokens_per_word",), cell_f + ("tokens_per_word",),
            better_ratio))
        rows.append(_trend(
            bundle, f"{family}-type-entropy",
            f"{family}: model type entropy, init vs fin",
            "init < fin",
            ("conditions", init_id, "type_entropy_bits"),
            ("conditions", fin_id, "type_entropy_bits"), "<"))
        rows.append(_trend(
            bundle, f"{family}-corpus-entropy",
            f"{family}: corpus entropy on the training corpus, init vs fin",
            "init < fin",
            cell + ("corpus_entropy_bits",), cell_f + ("corpus_entropy_bits",),
            "<"))
        ppl_direction = ">" if family == "raw" else "<"
        rows.append(_trend(
            bundle, f"{family}-perplexity",
            f"{family}: bigram perplexity on the training corpus, init vs fin",
            f"init {ppl_direction} fin",
            cell + ("perplexity",), cell_f + ("perplexity",), ppl_direction))
        rows.append(_trend(
            bundle, f"{family}-morph-coverage",
            f"{family}: morpheme coverage, init vs fin",
            "init < fin",
            ("morph", family, "coverage_init", "count"),
            ("morph", family, "coverage_fin", "count"), "<"))
        beta = _dig(bundle, ("morph", family, "regression", "coefficients",
                             "agreement"))
        if beta is not None:
            rows.append({
                "id": f"{family}-agreement-beta",
                "description": f"{family}: regression slope of log-probability "
                               f"on agreement",
                "reference_direction": "beta > 0",
                "lhs": beta,
                "rhs": 0.0,
                "holds": beta > 0.0,
            })
    return [row for row in rows if row is not None]


def _write_table(bundle: dict, path: Path) -> None:
    header = ["model"]
    for corpus_id in CORPUS_IDS:
        header += [f"{corpus_id}:toks_per_word", f"{corpus_id}:entropy_bits",
                   f"{corpus_id}:perplexity"]
    lines = ["\t".join(header)]
    for condition, data in bundle["conditions"].items():
        row = [condition]
        for corpus_id in CORPUS_IDS:
            cell = data["cells"].get(corpus_id)
            if cell is None:
                row += ["", "", ""]
            else:
                row += [f"{cell['tokens_per_word']:.17g}",
                        f"{cell['corpus_entropy_bits']:.17g}",
                        f"{cell['perplexity']:.17g}"]
        lines.append("\t".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_lengths(bundle: dict, path: Path) -> None:
    lines = ["model\tlength\tcount"]
    for condition, data in bundle["conditions"].items():
        histogram = data["length_histogram"]["histogram"]
        for length in sorted(histogram, key=int):
            lines.append(f"{condition}\t{length}\t{histogram[length]}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def render_report(bundle: dict) -> str:
    """Fixed-width summary table, one row per condition."""
    warnings = []
    columns = [("toks/w", "tokens_per_word", "{:.3f}"),
               ("entropy", "corpus_entropy_bits", "{:.3f}"),
               ("ppl", "perplexity", "{:.2f}")]
    model_width = max([len("model")] + [len(c) for c in bundle["conditions"]])
    lines = []
    corpus_headers = []
    for corpus_id in CORPUS_IDS:
        corpus_headers.append(f"{corpus_id:^26}")
    lines.append(" " * model_width + " | " + " | ".join(corpus_headers))
    sub = []
    for _ in CORPUS_IDS:
        sub.append(" ".join(f"{name:>8}" for name, _, _ in columns))
    lines.append("model".ljust(model_width) + " | " + " | ".join(sub))
    lines.append("-" * len(lines[-1]))
    for condition, data in bundle["conditions"].items():
        parts = []
        for corpus_id in CORPUS_IDS:
            cell = data["cells"].get(corpus_id)
            cols = []
            for name, key, fmt in columns:
                value = None if cell is None else cell.get(key)
                if value is None:
                    cols.append(f"{'—':>8}")
                    warnings.append(f"missing {key} for {condition}/{corpus_id}")
                else:
                    cols.append(f"{fmt.format(value):>8}")
            parts.append(" ".join(cols))
        lines.append(condition.ljust(model_width) + " | " + " | ".join(parts))

    if bundle.get("morph"):
        lines.append("")
        lines.append("morpheme recovery (count / lexicon):")
        for family, data in bundle["morph"].items():
            lines.append(
                f"  {family}: init {data['coverage_init']['count']}"
                f" ({data['coverage_init']['fraction']:.1%})"
                f", fin {data['coverage_fin']['count']}"
                f" ({data['coverage_fin']['fraction']:.1%})"
                f", union {data['union_coverage']}"
                f" of {data['lexicon_size']}")

    if bundle.get("trends"):
        lines.append("")
        lines.append("informational trends (reference directions from "
                     "large-corpus studies; not asserted):")
        for trend in bundle["trends"]:
            mark = "agrees" if trend["holds"] else "differs"
            lines.append(f"  [{mark:>7}] {trend['description']}: "
                         f"{trend['lhs']:.4g} vs {trend['rhs']:.4g} "
                         f"(reference {trend['reference_direction']})")

    for warning in warnings:
        lines.append(f"warning: {warning}")
    return "\n".join(lines)
