"""Standalone recount of the mini-corpus pipeline outputs.

Reimplements tokenization, header classification, alignment, example
generation and corpus statistics from the written rules, without sharing
code with the Rust crates. Writes golden.json and expected_examples.jsonl.
"""
import json
import sys
from fractions import Fraction

KEYWORDS = [
    ("introduction", {"introduction", "case"}),
    ("literature", {"background", "literature", "related"}),
    ("methods", {"method", "methods", "techniques", "methodology"}),
    ("results", {"result", "results", "experimental", "experiment", "experiments"}),
    ("conclusion", {"conclusion", "conclusions", "concluding", "discussion", "limitations"}),
]
TYPES = ["introduction", "literature", "methods", "results", "conclusion", "other"]
SELECTED = {"introduction", "methods", "results", "conclusion"}
MAX_SOURCE, MAX_TARGET = 500, 100


def token(word):
    end = len(word)
    while end > 0 and not word[end - 1].isalnum():
        end -= 1
    start = 0
    while start < end:
        c = word[start]
        if c.isalnum():
            break
        if c == "@" and start + 1 < end and word[start + 1].isalnum():
            break
        start += 1
    w = word[start:end]
    return w.lower() if w else None


def tokens(text):
    return [t for t in (token(w) for w in text.split()) if t is not None]


def classify(header):
    toks = set(tokens(header))
    for name, kws in KEYWORDS:
        if toks & kws:
            return name
    return "other"


def lcs(a, b):
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a)):
        for j in range(len(b)):
            table[i + 1][j + 1] = (
                table[i][j] + 1 if a[i] == b[j] else max(table[i][j + 1], table[i + 1][j])
            )
    return table[-1][-1]


def load(record):
    sections = []
    for sents in record["sections"]:
        sections.append([t for t in (tokens(s) for s in sents) if t])
    summary = []
    for s in record["abstract_text"]:
        words = [w for w in s.split() if w not in ("<S>", "</S>")]
        t = tokens(" ".join(words))
        if t:
            summary.append(t)
    return str(record["article_id"]), record["section_names"], sections, summary


def align(sections, summary):
    """Section index of every summary sentence: best LCS / |summary sentence|,
    ties to the smallest section and then the smallest sentence index."""
    out = []
    for a in summary:
        best = None
        for k, sents in enumerate(sections):
            for s in sents:
                score = Fraction(lcs(s, a), len(a))
                if best is None or score > best[0]:
                    best = (score, k)
        out.append(best[1])
    return out


def copied(source, target, n):
    if len(target) < n:
        return 0.0
    src = {tuple(source[i:i + n]) for i in range(len(source) - n + 1)}
    tgt = {tuple(target[i:i + n]) for i in range(len(target) - n + 1)}
    return len([g for g in tgt if g in src]) / len(tgt)


def plain_sum(values):
    # left to right without compensation; builtin sum() compensates on 3.12+
    total = 0.0
    for v in values:
        total += v
    return total


def main(path):
    examples = []
    per_doc = {}
    doc_words = summary_words = summary_sents = 0
    ex_words = tgt_words = 0
    tally = {t: 0 for t in TYPES}
    copies = {n: [] for n in (1, 2, 3, 4)}
    n_docs = 0
    with open(path) as f:
        for line in f:
            if not line.strip():
                continue
            doc_id, names, sections, summary = load(json.loads(line))
            n_docs += 1
            doc_words += sum(len(s) for sec in sections for s in sec)
            summary_words += sum(len(s) for s in summary)
            summary_sents += len(summary)
            owner = align(sections, summary)
            types = [classify(h) for h in names]
            for k in owner:
                tally[types[k]] += 1
            count = 0
            for k, sents in enumerate(sections):
                if types[k] not in SELECTED:
                    continue
                target = [t for m, a in enumerate(summary) if owner[m] == k for t in a]
                source = [t for s in sents for t in s]
                if not target or not source:
                    continue
                count += 1
                ex_words += len(source)
                tgt_words += len(target)
                for n in copies:
                    copies[n].append(copied(source, target, n))
                examples.append({
                    "doc_id": doc_id,
                    "section_index": k,
                    "section_type": types[k],
                    "source": " ".join(source[:MAX_SOURCE]),
                    "target": " ".join(target[:MAX_TARGET]),
                })
            per_doc[doc_id] = count

    total = sum(tally.values())
    n_ex = len(examples)
    golden = {
        "examples_per_doc": per_doc,
        "corpus": {
            "n_documents": n_docs,
            "n_examples": n_ex,
            "avg_document_words": doc_words / n_docs,
            "avg_summary_words": summary_words / n_docs,
            "avg_example_words": ex_words / n_ex,
            "avg_target_words": tgt_words / n_ex,
            "avg_summary_sentences": summary_sents / n_docs,
            "section_distribution": {t: tally[t] / total for t in TYPES},
        },
        "copy": {str(n): plain_sum(sorted(v)) / len(v) for n, v in copies.items()},
    }
    with open("golden.json", "w") as f:
        json.dump(golden, f, indent=2, sort_keys=True)
        f.write("\n")
    with open("expected_examples.jsonl", "w") as f:
        for e in examples:
            f.write(json.dumps(e, separators=(",", ":")) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "mini.jsonl")
