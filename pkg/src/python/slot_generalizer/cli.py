#!/usr/bin/env python3
"""
slot_generalizer: generalize case slot values with tree cut models, print description
length tables, and run PP-attachment disambiguation experiments.

Subcommands:
    generalize  classes (and probabilities) selected for one (head, slot)
    lengths     description lengths of every cut of the thesaurus for one (head, slot)
    ppattach    coverage and accuracy of one strategy on a PP test file
    synth       write a seeded synthetic thesaurus, training corpus and test set
    curve       learning curve (coverage/accuracy against training fraction)

Exit codes: 0 ok, 2 I/O, format or config error, 3 empty sample, 4 enumeration limit
exceeded, 5 unknown strategy.

Settings come from built-in defaults, then the YAML file given with --config, then flags.
"""
import argparse
import logging
import os
import sys
from collections import namedtuple

import yaml

from pp_attachment.disambig import PRUNE_POLICIES, STRATEGIES, Disambiguator, load_pp_instances, run_strategy
from pp_attachment.experiment import DEFAULT_FRACTIONS, DEFAULT_TRIALS, learning_curve
from pp_attachment.synthetic import SynthSpec, generate_synthetic, write_synthetic
from slot_generalizer.report import (
    FORMATS,
    curve_report,
    decisions_report,
    eval_report,
    generalization_report,
    lengths_report,
    sa_report,
)
from tree_cut.assoc import DEFAULT_T_THRESHOLD, MARGINAL_SCOPES, CooccurrenceTable, sa_table, t_threshold_for
from tree_cut.cooccur import load_triples, slot_sample
from tree_cut.errors import (
    ConfigError,
    EmptySampleError,
    EnumerationLimitError,
    ThesaurusFormatError,
    TriplesFormatError,
)
from tree_cut.thesaurus import cut_labels, load_thesaurus
from tree_cut.treecut import DEFAULT_ENUM_LIMIT, DEFAULT_EXAMPLE_WORDS, DEFAULT_THRESHOLD, generalize, length_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EMPTY_SAMPLE = 3
EXIT_ENUM_LIMIT = 4
EXIT_BAD_STRATEGY = 5

DEFAULT_CONFIG = "config/slot_generalizer.yaml"
METHODS = ("mdl", "sa")
PACKAGES = ("tree_cut", "pp_attachment", "slot_generalizer")

DEFAULTS = {
    "threshold": DEFAULT_THRESHOLD,
    "t_threshold": DEFAULT_T_THRESHOLD,
    "example_words": DEFAULT_EXAMPLE_WORDS,
    "enum_limit": DEFAULT_ENUM_LIMIT,
    "format": "tsv",
    "strategy": "combined",
    "method": "mdl",
    "seed": 0,
    "prune": "global",
    "marginal": "slot",
    "curve_fractions": list(DEFAULT_FRACTIONS),
    "curve_trials": DEFAULT_TRIALS,
    "curve_strategies": ["mdl", "sa"],
}

RunConfig = namedtuple("RunConfig", [
    "command", "thesaurus", "triples", "test", "head", "slot", "out_dir",
    "threshold", "t_threshold", "example_words", "enum_limit", "format", "strategy", "method",
    "seed", "prune", "marginal", "curve_fractions", "curve_trials", "curve_strategies",
    "synth", "verbose",
])

REQUIRED = {
    "generalize": ("thesaurus", "triples", "head", "slot"),
    "lengths": ("thesaurus", "triples", "head", "slot"),
    "ppattach": ("thesaurus", "triples", "test"),
    "synth": ("out_dir",),
    "curve": ("thesaurus", "triples", "test"),
}


def load_config(config_path=None):
    """Load run settings from YAML. Returns dict; a missing file gives {}."""
    if not config_path or not os.path.isfile(config_path):
        return {}
    with open(config_path, encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError("cannot parse %s: %s" % (config_path, e))
    if not isinstance(data, dict):
        raise ConfigError("%s must contain a mapping at top level" % config_path)
    return data


def setup_logging(log_file=None, verbose=False):
    """
    Configure the package loggers. Stderr gets INFO (DEBUG with --verbose); the optional
    log file gets DEBUG. Stdout is reserved for reports.
    """
    fmt = logging.Formatter("%(asctime)s %(levelname)s: %(message)s", datefmt="%Y-%m-%d %H:%M:%S")

    stderr = logging.StreamHandler(sys.stderr)
    stderr.setLevel(logging.DEBUG if verbose else logging.INFO)
    stderr.setFormatter(fmt)
    handlers = [stderr]

    if log_file:
        try:
            fh = logging.FileHandler(log_file, encoding="utf-8")
            fh.setLevel(logging.DEBUG)
            fh.setFormatter(fmt)
            handlers.append(fh)
        except OSError as e:
            logger.warning("Could not open log file %s: %s", log_file, e)

    for name in PACKAGES:
        pkg_logger = logging.getLogger(name)
        pkg_logger.setLevel(logging.DEBUG)
        for h in list(pkg_logger.handlers):
            pkg_logger.removeHandler(h)
            h.close()
        for h in handlers:
            pkg_logger.addHandler(h)
        pkg_logger.propagate = False


def _synth_spec(file_synth, args):
    if not isinstance(file_synth, dict):
        raise ConfigError("'synth' must be a mapping")
    unknown = sorted(set(file_synth) - set(SynthSpec._fields))
    if unknown:
        raise ConfigError("unknown synth settings: %s" % ", ".join(unknown))
    values = dict(file_synth)
    if "preps" in values:
        values["preps"] = tuple(values["preps"])
    for field, flag in (("n_train", "train_size"), ("n_test", "test_size")):
        if getattr(args, flag, None) is not None:
            values[field] = getattr(args, flag)
    return SynthSpec(**values)


def _split_list(value):
    return [v.strip() for v in value.split(",") if v.strip()]


def build_run_config(args, file_config):
    """
    Merge defaults, file settings and flags into a validated RunConfig.

    Raises:
        ConfigError: missing required path or setting out of range.
    """
    unknown = sorted(set(file_config) - set(DEFAULTS) - {"significance", "synth"})
    if unknown:
        raise ConfigError("unknown config keys: %s" % ", ".join(unknown))
    merged = dict(DEFAULTS)
    merged.update({k: v for k, v in file_config.items() if k in DEFAULTS})

    if "significance" in file_config and "t_threshold" not in file_config:
        try:
            merged["t_threshold"] = t_threshold_for(float(file_config["significance"]))
        except (TypeError, ValueError) as e:
            raise ConfigError("bad significance: %s" % e)

    for key in ("threshold", "t_threshold", "example_words", "enum_limit", "format", "strategy",
                "method", "seed", "prune", "marginal"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if args.command == "curve" and getattr(args, "strategy", None) is not None:
        merged["curve_strategies"] = _split_list(args.strategy)
    if getattr(args, "fractions", None) is not None:
        merged["curve_fractions"] = [float(f) for f in _split_list(args.fractions)]
    if getattr(args, "trials", None) is not None:
        merged["curve_trials"] = args.trials

    if not 0.0 <= merged["threshold"] <= 1.0:
        raise ConfigError("threshold must be in [0, 1], got %r" % merged["threshold"])
    if merged["t_threshold"] < 0:
        raise ConfigError("t_threshold must be nonnegative, got %r" % merged["t_threshold"])
    if merged["enum_limit"] < 1:
        raise ConfigError("enum_limit must be at least 1, got %r" % merged["enum_limit"])
    if merged["example_words"] < 0:
        raise ConfigError("example_words must be nonnegative")
    for key, allowed in (("format", FORMATS), ("method", METHODS), ("prune", PRUNE_POLICIES),
                         ("marginal", MARGINAL_SCOPES)):
        if merged[key] not in allowed:
            raise ConfigError("%s must be one of %s, got %r" % (key, ", ".join(allowed), merged[key]))

    paths = {key: getattr(args, key, None) for key in ("thesaurus", "triples", "test", "head", "slot", "out_dir")}
    missing = [key for key in REQUIRED[args.command] if not paths[key]]
    if missing:
        raise ConfigError("%s needs --%s" % (args.command, ", --".join(m.replace("_", "-") for m in missing)))

    synth = None
    if args.command == "synth":
        synth = _synth_spec(file_config.get("synth") or {}, args)._replace(seed=merged["seed"])

    return RunConfig(
        command=args.command,
        thesaurus=paths["thesaurus"],
        triples=paths["triples"],
        test=paths["test"],
        head=paths["head"],
        slot=paths["slot"],
        out_dir=paths["out_dir"],
        threshold=float(merged["threshold"]),
        t_threshold=float(merged["t_threshold"]),
        example_words=int(merged["example_words"]),
        enum_limit=int(merged["enum_limit"]),
        format=merged["format"],
        strategy=merged["strategy"],
        method=merged["method"],
        seed=int(merged["seed"]),
        prune=merged["prune"],
        marginal=merged["marginal"],
        curve_fractions=tuple(merged["curve_fractions"]),
        curve_trials=int(merged["curve_trials"]),
        curve_strategies=tuple(merged["curve_strategies"]),
        synth=synth,
        verbose=bool(getattr(args, "verbose", False)),
    )


def cmd_generalize(cfg):
    thesaurus = load_thesaurus(cfg.thesaurus)
    triples = load_triples(cfg.triples)
    if cfg.method == "sa":
        table = CooccurrenceTable.from_triples(triples)
        if table.pair_count(cfg.head, cfg.slot) <= 0:
            raise EmptySampleError("no triples for head %r slot %r" % (cfg.head, cfg.slot))
        scores = sa_table(cfg.head, cfg.slot, table, thesaurus, marginal=cfg.marginal)
        sys.stdout.write(sa_report(cfg.head, cfg.slot, scores, cfg.format))
        return EXIT_OK
    result = generalize(cfg.head, cfg.slot, triples, thesaurus, cfg.threshold, cfg.example_words)
    sys.stdout.write(generalization_report(result, cfg.format))
    return EXIT_OK


def cmd_lengths(cfg):
    thesaurus = load_thesaurus(cfg.thesaurus)
    sample = slot_sample(load_triples(cfg.triples), cfg.head, cfg.slot)
    if sample.total <= 0:
        raise EmptySampleError("no triples for head %r slot %r" % (cfg.head, cfg.slot))
    table = length_table(thesaurus, sample, cfg.enum_limit)
    sys.stdout.write(lengths_report(table, lambda cut: cut_labels(cut, thesaurus), cfg.format))
    return EXIT_OK


def _bad_strategies(names):
    bad = [n for n in names if n not in STRATEGIES]
    if bad:
        logger.error("Unknown strategy %s (expected one of %s)", ", ".join(bad), ", ".join(STRATEGIES))
    return bad


def cmd_ppattach(cfg):
    if _bad_strategies([cfg.strategy]):
        return EXIT_BAD_STRATEGY
    thesaurus = load_thesaurus(cfg.thesaurus)
    triples = load_triples(cfg.triples)
    instances = load_pp_instances(cfg.test)
    disambiguator = Disambiguator(thesaurus, triples, cfg.t_threshold, cfg.prune, cfg.marginal)
    decisions, report = run_strategy(instances, disambiguator, cfg.strategy)
    if cfg.verbose:
        sys.stdout.write(decisions_report(instances, decisions, cfg.format))
    sys.stdout.write(eval_report(cfg.strategy, report, cfg.format))
    return EXIT_OK


def cmd_synth(cfg):
    thesaurus, train, test = generate_synthetic(cfg.synth)
    for path in write_synthetic(cfg.out_dir, thesaurus, train, test):
        logger.info("Wrote %s", path)
    return EXIT_OK


def cmd_curve(cfg):
    if _bad_strategies(cfg.curve_strategies):
        return EXIT_BAD_STRATEGY
    thesaurus = load_thesaurus(cfg.thesaurus)
    train = load_triples(cfg.triples)
    test = load_pp_instances(cfg.test)
    points = learning_curve(train, test, thesaurus, cfg.curve_fractions, cfg.curve_trials, cfg.seed,
                            cfg.curve_strategies, cfg.t_threshold, cfg.prune, cfg.marginal)
    sys.stdout.write(curve_report(points, cfg.format))
    return EXIT_OK


COMMANDS = {
    "generalize": cmd_generalize,
    "lengths": cmd_lengths,
    "ppattach": cmd_ppattach,
    "synth": cmd_synth,
    "curve": cmd_curve,
}


def parse_args(argv=None):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=DEFAULT_CONFIG, help="YAML settings file (default: %s)" % DEFAULT_CONFIG)
    common.add_argument("--format", help="Output format: tsv or structured (default: tsv)")
    common.add_argument("--seed", type=int, help="Random seed (default: 0)")
    common.add_argument("--log-file", metavar="FILE", help="Write log to file (DEBUG level); stderr keeps INFO")
    common.add_argument("--verbose", "-v", action="store_true",
                        help="Show DEBUG on stderr; ppattach also prints per-instance decisions")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--thesaurus", metavar="FILE", help="Thesaurus file (tab-indented tree)")
    data.add_argument("--triples", metavar="FILE", help="Training triples TSV (head, slot, value[, count])")

    slot = argparse.ArgumentParser(add_help=False)
    slot.add_argument("--head", help="Head word as it appears in the triples")
    slot.add_argument("--slot", help="Slot name (e.g. arg1, or a preposition)")

    pp = argparse.ArgumentParser(add_help=False)
    pp.add_argument("--test", metavar="FILE", help="PP test file (verb, noun1, prep, noun2, gold)")
    pp.add_argument("--t-threshold", dest="t_threshold", type=float, help="t-score gate for la and sa (default: 1.645)")
    pp.add_argument("--prune", help="Thesaurus pruning: global, per_slot or none (default: global)")
    pp.add_argument("--marginal", help="Sample P(C) is estimated from for sa: slot, head or global (default: slot)")

    p = argparse.ArgumentParser(
        description="Generalize case slot values to thesaurus classes with tree cut models (MDL), "
                    "and disambiguate PP attachment with them.",
        epilog="Exit codes: 0 ok, 2 I/O/format/config error, 3 empty sample, "
               "4 enumeration limit exceeded, 5 unknown strategy.",
    )
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    g = sub.add_parser("generalize", parents=[common, data, slot], help="Classes selected for one (head, slot)")
    g.add_argument("--method", help="mdl (tree cut model) or sa (selectional association) (default: mdl)")
    g.add_argument("--threshold", type=float, help="Minimum class probability to report (default: 0.05)")
    g.add_argument("--example-words", dest="example_words", type=int, help="Example words per class (default: 3)")
    g.add_argument("--marginal", help="Sample P(C) is estimated from for --method sa (default: slot)")

    ln = sub.add_parser("lengths", parents=[common, data, slot], help="Description lengths of every cut")
    ln.add_argument("--enum-limit", dest="enum_limit", type=int, help="Refuse trees with more cuts (default: 10^6)")

    pa = sub.add_parser("ppattach", parents=[common, data, pp], help="Evaluate one disambiguation strategy")
    pa.add_argument("--strategy", help="One of %s (default: combined)" % ", ".join(STRATEGIES))

    sy = sub.add_parser("synth", parents=[common], help="Write a seeded synthetic corpus")
    sy.add_argument("--out-dir", dest="out_dir", metavar="DIR", help="Output directory")
    sy.add_argument("--train-size", dest="train_size", type=int, help="Number of training triples")
    sy.add_argument("--test-size", dest="test_size", type=int, help="Number of test instances")

    cv = sub.add_parser("curve", parents=[common, data, pp], help="Learning curve over training fractions")
    cv.add_argument("--strategy", help="Comma-separated strategies (default: mdl,sa)")
    cv.add_argument("--fractions", help="Comma-separated training fractions (default: 0.5,...,0.9)")
    cv.add_argument("--trials", type=int, help="Subsamples per fraction (default: 10)")
    return p.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    setup_logging(log_file=args.log_file, verbose=args.verbose)
    try:
        cfg = build_run_config(args, load_config(args.config))
        return COMMANDS[cfg.command](cfg)
    except EnumerationLimitError as e:
        logger.error("%s", e)
        return EXIT_ENUM_LIMIT
    except EmptySampleError as e:
        logger.error("Empty sample: %s", e)
        return EXIT_EMPTY_SAMPLE
    except (ThesaurusFormatError, TriplesFormatError) as e:
        logger.error("Bad input file: %s", e)
        return EXIT_INPUT
    except ConfigError as e:
        logger.error("Bad configuration: %s", e)
        return EXIT_INPUT
    except OSError as e:
        logger.error("%s", e)
        return EXIT_INPUT
    except ValueError as e:
        logger.error("Invalid input: %s", e)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
