"""
Report rendering for the CLI: tab-separated rows, or structured JSON documents.

Every renderer returns a string ending in a newline. Structured documents are built from
dicts filled in a fixed order, so identical runs produce byte-identical output.
"""
import json
import math

FORMATS = ("tsv", "structured")


def _num(x, fmt="%.6g"):
    return ("-inf" if x < 0 else "inf") if math.isinf(x) else fmt % x


def _finite(x):
    return None if math.isinf(x) else x


def _render(fmt, header, rows, doc):
    if fmt == "structured":
        return json.dumps(doc, indent=2) + "\n"
    lines = ["\t".join(header)] + ["\t".join(r) for r in rows]
    return "\n".join(lines) + "\n"


def generalization_report(result, fmt="tsv"):
    """Class, probability and example words of each kept class of a GeneralizationResult."""
    rows = [(e.label, _num(e.probability), ",".join(e.examples)) for e in result.entries]
    doc = {
        "head": result.head,
        "slot": result.slot,
        "threshold": result.threshold,
        "classes": [{"class": e.label, "probability": e.probability, "examples": list(e.examples)}
                    for e in result.entries],
    }
    return _render(fmt, ("class", "probability", "examples"), rows, doc)


def sa_report(head, slot, scores, fmt="tsv"):
    rows = [(s.class_or_word, _num(s.score), _num(s.probability)) for s in scores]
    doc = {
        "head": head,
        "slot": slot,
        "classes": [{"class": s.class_or_word, "association": s.score, "probability": s.probability}
                    for s in scores],
    }
    return _render(fmt, ("class", "association", "probability"), rows, doc)


def lengths_report(table, labels, fmt="tsv"):
    """
    One row per cut: labels, L_par, L_dat, L'. The first row with minimal L' is marked
    with ``*`` (``best`` in structured output).

    table: (cut, LengthReport) pairs; labels: cut -> sequence of class labels.
    """
    best = min(range(len(table)), key=lambda i: table[i][1].l_prime) if table else None
    rows = []
    cuts = []
    for i, (cut, rep) in enumerate(table):
        names = list(labels(cut))
        rows.append(("[%s]" % ", ".join(names), _num(rep.param_len, "%.2f"), _num(rep.data_len, "%.2f"),
                     _num(rep.l_prime, "%.2f"), "*" if i == best else ""))
        cuts.append({
            "cut": names,
            "param_len": rep.param_len,
            "data_len": _finite(rep.data_len),
            "l_prime": _finite(rep.l_prime),
            "best": i == best,
        })
    model_len = table[0][1].model_len if table else 0.0
    doc = {"model_len": model_len, "cuts": cuts}
    return _render(fmt, ("cut", "L_par", "L_dat", "L'", "best"), rows, doc)


def eval_report(strategy, report, fmt="tsv"):
    """One-row summary: strategy, coverage %, accuracy %."""
    rows = [(strategy, "%.1f" % report.coverage, "%.1f" % report.accuracy,
             "%d" % report.n_decided, "%d" % report.n_total)]
    doc = {
        "strategy": strategy,
        "coverage": report.coverage,
        "accuracy": report.accuracy,
        "decided": report.n_decided,
        "correct": report.n_correct,
        "total": report.n_total,
    }
    return _render(fmt, ("method", "coverage", "accuracy", "decided", "total"), rows, doc)


def decisions_report(instances, decisions, fmt="tsv"):
    rows = []
    docs = []
    for q, d in zip(instances, decisions):
        rows.append((q.verb, q.noun1, q.prep, q.noun2, q.gold, d.verdict, d.strategy,
                     _num(d.evidence[0]), _num(d.evidence[1])))
        docs.append({
            "verb": q.verb, "noun1": q.noun1, "prep": q.prep, "noun2": q.noun2, "gold": q.gold,
            "verdict": d.verdict, "strategy": d.strategy,
            "evidence": [_finite(d.evidence[0]), _finite(d.evidence[1])],
        })
    header = ("verb", "noun1", "prep", "noun2", "gold", "verdict", "by", "verb_score", "noun_score")
    return _render(fmt, header, rows, {"decisions": docs})


def curve_report(points, fmt="tsv"):
    rows = [("%g" % p.fraction, p.strategy, "%.2f" % p.coverage, "%.2f" % p.accuracy) for p in points]
    doc = {"points": [p._asdict() for p in points]}
    return _render(fmt, ("fraction", "strategy", "coverage", "accuracy"), rows, doc)
