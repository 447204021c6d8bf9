"""Regenerate the checked-in fixtures and golden values.

Run from the repository root:  python tests/fixtures/make_fixtures.py

Everything is produced with the slow oracles in tests/oracles.py, never with
the package under test.
"""

from __future__ import annotations

import json
import random
import sys
from collections import Counter
from fractions import Fraction
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent))

import oracles  # noqa: E402

BASE_MERGES = 600
MARK = "Ġ"

MEDICAL = [
    "cholesterol", "hypercholesterolemia", "myocardial", "infarction", "atorvastatin",
    "hyperlipidemia", "thrombocytopenia", "angioplasty", "nephropathy", "echocardiogram",
    "bradycardia", "tachycardia", "dyslipidemia", "arrhythmia", "cardiomyopathy",
    "atherosclerosis",
]

TOY_MEDICAL = [
    "hepatitis", "hepatic", "hepatocyte", "hepatomegaly", "nephritis", "nephrotic",
    "neuropathy", "neuritis", "neuralgia", "gastritis", "gastroenteritis", "arthritis",
    "osteoarthritis", "osteoporosis", "dermatitis", "bronchitis", "bronchiectasis",
    "cardiology", "cardiologist", "pathology", "pathologist", "hematology", "hematoma",
]


def byte_symbols() -> list[str]:
    """The 256 byte symbols in byte order, cross-checked against ``tokenizers``."""
    from tokenizers.pre_tokenizers import ByteLevel

    printable = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(ord("¡"), ord("¬") + 1))
        + list(range(ord("®"), ord("ÿ") + 1))
    )
    table, shift = [], 0
    for b in range(256):
        if b in printable:
            table.append(chr(b))
        else:
            table.append(chr(256 + shift))
            shift += 1
    assert set(table) == set(ByteLevel.alphabet())
    for b in range(128):
        got = "".join(oracles.pre_tokenize(chr(b)))
        assert got == table[b], (b, got, table[b])
    return table


def chain(token: str) -> list[tuple[str, str]]:
    return [(token[:i], token[i]) for i in range(1, len(token))]


def write_vocab(path: Path, tokens: list[str]) -> dict[str, int]:
    vocab = {t: i for i, t in enumerate(tokens)}
    path.write_text(json.dumps(vocab, ensure_ascii=False, indent=0) + "\n", encoding="utf-8")
    return vocab


def write_merges(path: Path, merges, base_count=None) -> None:
    header = "#version: 0.2" + (f" base_merges={base_count}" if base_count is not None else "")
    path.write_text(header + "\n" + "".join(f"{a} {b}\n" for a, b in merges), encoding="utf-8")


def main() -> None:
    rng = random.Random(20240517)
    english = (HERE / "english.txt").read_text(encoding="utf-8").splitlines()

    # base vocabulary: byte alphabet + merges trained on the English text
    surfaces: Counter = Counter()
    for line in english:
        surfaces.update(oracles.pre_tokenize(line))
    base_merges = oracles.train(surfaces, BASE_MERGES)
    tokens = byte_symbols()
    for a, b in base_merges:
        if a + b not in tokens:
            tokens.append(a + b)
    vocab = write_vocab(HERE / "vocab.json", tokens)
    write_merges(HERE / "merges.txt", base_merges)

    # domain vocabulary with left-to-right chain merges appended
    domain = ["cholesterol"] + [MARK + w for w in MEDICAL]
    assert not any(t in vocab for t in domain)
    base_set = set(base_merges)
    domain_merges = []
    for t in domain:
        for pair in chain(t):
            if pair not in base_set and pair not in domain_merges:
                domain_merges.append(pair)
    (HERE / "domain.txt").write_text("".join(t + "\n" for t in domain), encoding="utf-8")
    write_merges(HERE / "merges_ext.txt", base_merges + domain_merges, base_count=len(base_merges))
    all_merges = base_merges + domain_merges

    def tok(text, adaptive, dom=domain, merges=all_merges):
        return oracles.tokenize(text, vocab, merges, dom, adaptive)

    # standard BPE breaks cholesterol, AdaptBPE keeps it
    chol_domain = ["cholesterol"]
    chol_merges = base_merges + [p for p in chain("cholesterol") if p not in base_set]
    chol_bpe = tok("hypercholesterolemia", False, chol_domain, chol_merges)
    chol_adapt = tok("hypercholesterolemia", True, chol_domain, chol_merges)
    assert "cholesterol" not in chol_bpe, chol_bpe
    assert "cholesterol" in chol_adapt, chol_adapt

    # synthetic corpus: exactly 30% of word occurrences are domain words
    filler = sorted({w.lower() for line in english for w in oracles.words_of(line)} - set(MEDICAL))
    docs = []
    for _ in range(120):
        words = rng.sample(MEDICAL, 3) + [rng.choice(filler) for _ in range(7)]
        rng.shuffle(words)
        docs.append(" ".join(words) + ".")
    (HERE / "medical_corpus.txt").write_text("\n".join(docs) + "\n", encoding="utf-8")
    for w in MEDICAL:
        assert len(tok(" " + w, False)) >= 3, w
        assert tok(" " + w, True) == [MARK + w], w

    total_a, count = oracles.fragment(docs, lambda w: tok(" " + w, False))
    total_b, _ = oracles.fragment(docs, lambda w: tok(" " + w, True))
    score_a, score_b = Fraction(total_a, count), Fraction(total_b, count)
    drop = 100 * (score_a - score_b) / score_a
    dom_occ = sum(1 for d in docs for w in oracles.words_of(d) if w in MEDICAL)

    # golden tokens for the CLI: first 15 English lines plus 5 corpus docs
    sample = english[:15] + docs[:5]
    (HERE / "sample.txt").write_text("\n".join(sample) + "\n", encoding="utf-8")
    with open(HERE / "golden_tokens_bpe.jsonl", "w", encoding="utf-8") as fh:
        for line in sample:
            fh.write(json.dumps({"tokens": tok(line, False)}, ensure_ascii=False) + "\n")
    with open(HERE / "golden_tokens_adaptbpe.jsonl", "w", encoding="utf-8") as fh:
        for line in sample:
            fh.write(json.dumps({"tokens": tok(line, True)}, ensure_ascii=False) + "\n")

    # toy corpus for the builders
    toy_docs = []
    for _ in range(60):
        words = rng.sample(TOY_MEDICAL, 2) + [rng.choice(filler) for _ in range(6)]
        rng.shuffle(words)
        toy_docs.append(" ".join(words))
    (HERE / "toy_corpus.txt").write_text("\n".join(toy_docs) + "\n", encoding="utf-8")
    toy_words = Counter(w for d in toy_docs for w in oracles.words_of(d))

    def base_len(w):
        return len(oracles.tokenize(" " + w, vocab, base_merges))

    golden_builders = {}
    for k in (1, 2):
        pool = Counter({w: c for w, c in toy_words.items() if base_len(w) > k})
        surf: Counter = Counter()
        for w, c in pool.items():
            for s in oracles.pre_tokenize(" " + w):
                surf[s] += c
        learned = oracles.train(surf, sum(len(s) for s in surf))
        ranked, pairs = [], []
        for a, b in learned:
            if a + b in vocab or a + b in ranked:
                continue
            ranked.append(a + b)
            pairs.append((a, b))

        def score(counts, n, pairs=pairs, ranked=ranked):
            merges = base_merges + [p for p in pairs[:n] if p not in base_set]
            total = sum(c * len(oracles.tokenize(" " + w, vocab, merges, ranked[:n], True)) for w, c in counts.items())
            return Fraction(total, sum(counts.values()))

        golden_builders[k] = {
            "pool_words": dict(sorted(pool.items())),
            "ranked_subwords": ranked,
            "candidate_merges": pairs,
            "score": score,
        }

    # avocado: gamma 2.0, batches of 5, score over words split into more than 2 pieces
    g2 = golden_builders[2]
    gamma, batch = Fraction(2), 5
    n, trajectory = 0, []
    while True:
        s = g2["score"](g2["pool_words"], n)
        trajectory.append({"size": n, "score": float(s)})
        if s <= gamma or n >= len(g2["ranked_subwords"]):
            break
        n = min(n + batch, len(g2["ranked_subwords"]))
    avocado = {"gamma": 2.0, "batch": batch, "size": n, "reached": s <= gamma, "trajectory": trajectory}

    # size search over the whole corpus, words split into more than one piece
    g1 = golden_builders[1]
    sizesearch = {}
    for name, grid in {"coarse": [100, 500, 1000], "fine": [0, 5, 10, 20, 40, 80]}.items():
        rows = []
        for size in grid:
            eff = min(size, len(g1["ranked_subwords"]))
            rows.append((size, eff, g1["score"](toy_words, eff)))
        best = min(r[2] for r in rows)
        bound = (1 + Fraction(1, 100)) * best
        chosen = next(r for r in rows if r[2] <= bound)
        sizesearch[name] = {
            "grid": grid,
            "epsilon": 0.01,
            "scores": [float(r[2]) for r in rows],
            "chosen_size": chosen[0],
            "chosen_effective_size": chosen[1],
        }

    golden = {
        "base_merges": len(base_merges),
        "vocab_size": len(vocab),
        "domain_merges": len(domain_merges),
        "cholesterol": {"bpe": chol_bpe, "adaptbpe": chol_adapt},
        "compare": {
            "words": count,
            "domain_occurrences": dom_occ,
            "subwords_bpe": total_a,
            "subwords_adaptbpe": total_b,
            "score_bpe": float(score_a),
            "score_adaptbpe": float(score_b),
            "drop_percent": float(drop),
        },
        "builders": {
            str(k): {
                "pool_words": v["pool_words"],
                "ranked_subwords": v["ranked_subwords"],
                "candidate_merges": v["candidate_merges"],
            }
            for k, v in golden_builders.items()
        },
        "avocado": avocado,
        "sizesearch": sizesearch,
    }
    (HERE / "golden.json").write_text(json.dumps(golden, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    print(json.dumps({k: golden[k] for k in ("base_merges", "vocab_size", "cholesterol", "compare", "avocado", "sizesearch")}, ensure_ascii=False, indent=1))


if __name__ == "__main__":
    main()
