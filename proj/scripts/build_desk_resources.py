#!/usr/bin/env python3
"""Build the desk-scale lexical resources shipped under data/.

Inputs: a WordNet 3.0 database directory (the dict/ files: index.*, data.*,
*.exc, lexnames). The `wn==0.0.23` PyPI sdist bundles one under
wn/data/wordnet-3.0.

Outputs (all plain text, formats as consumed by libmcqforge):
  data/resources/desk/embeddings.txt   token v1 .. v50  (PPMI + SVD over glosses)
  data/resources/desk/taxonomy.tsv     hyponym<TAB>hypernym
  data/resources/desk/kb.tsv           subject<TAB>relation<TAB>object
  data/resources/desk/frequency.tsv    token<TAB>count
  data/resources/desk/school_vocab.txt one noun expression per line
  data/resources/desk/kb_noun_phrases.txt
  data/lexicons/pos_open_class.tsv     word<TAB>TAG[,TAG...]

Usage:
  python3 scripts/build_desk_resources.py --wordnet <dir> --out <repo root>
"""

import argparse
import collections
import os
import re

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import svds

TOKEN_RE = re.compile(r"[a-z][a-z'-]*[a-z]|[a-z]")
POS_FILES = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}
POS_TAG = {"n": "NOUN", "v": "VERB", "a": "ADJ", "s": "ADJ", "r": "ADV"}

# lexnames that roughly cover primary-school science nouns
SCHOOL_LEXNAMES = {5, 8, 13, 17, 19, 20, 22, 23, 27}


def read_data(path, pos):
    """Yield synset records from a data.* file."""
    with open(path, encoding="latin-1") as fh:
        for line in fh:
            if line.startswith("  "):
                continue
            body, _, gloss = line.partition(" | ")
            f = body.split()
            offset, lexfile, ss_type = f[0], int(f[1]), f[2]
            w_cnt = int(f[3], 16)
            words = [f[4 + 2 * i].lower() for i in range(w_cnt)]
            words = [re.sub(r"\(.*\)$", "", w) for w in words]
            i = 4 + 2 * w_cnt
            p_cnt = int(f[i])
            ptrs = []
            for k in range(p_cnt):
                sym, off, ppos = f[i + 1 + 4 * k], f[i + 2 + 4 * k], f[i + 3 + 4 * k]
                ptrs.append((sym, off, ppos))
            yield {
                "offset": offset,
                "pos": pos,
                "lexfile": lexfile,
                "type": ss_type,
                "words": words,
                "ptrs": ptrs,
                "gloss": gloss.strip(),
            }


def read_index(path):
    """word -> (tagsense_cnt, sense offsets in frequency order)."""
    out = {}
    with open(path, encoding="latin-1") as fh:
        for line in fh:
            if line.startswith("  "):
                continue
            f = line.split()
            lemma = f[0]
            synset_cnt = int(f[2])
            p_cnt = int(f[3])
            tagsense = int(f[5 + p_cnt])
            offsets = f[6 + p_cnt:6 + p_cnt + synset_cnt]
            out[lemma] = (tagsense, synset_cnt, offsets)
    return out


def tokens(text):
    return TOKEN_RE.findall(text.lower())


def head(lemma):
    return lemma.replace("_", " ").split()[-1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wordnet", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--dim", type=int, default=50)
    ap.add_argument("--vocab", type=int, default=30000)
    ap.add_argument("--window", type=int, default=4)
    args = ap.parse_args()

    wn = args.wordnet
    synsets = {}
    for pos, name in POS_FILES.items():
        for rec in read_data(os.path.join(wn, "data." + name), pos):
            synsets[(pos, rec["offset"])] = rec
    index = {pos: read_index(os.path.join(wn, "index." + name))
             for pos, name in POS_FILES.items()}

    # ---- corpus: glosses plus lemma/gloss and lemma/hypernym contexts
    sentences = []
    for (pos, off), rec in synsets.items():
        gloss_toks = tokens(rec["gloss"].replace('"', " "))
        sentences.append(gloss_toks)
        lemma_toks = [w for w in rec["words"] if "_" not in w]
        if lemma_toks:
            hyper = []
            for sym, hoff, hpos in rec["ptrs"]:
                if sym in ("@", "@i"):
                    h = synsets.get((hpos, hoff))
                    if h:
                        hyper.extend(head(w) for w in h["words"][:2])
            sentences.append(lemma_toks[:3] + hyper + gloss_toks[:12])

    freq = collections.Counter(t for s in sentences for t in s)
    vocab = [w for w, _ in freq.most_common(args.vocab)]
    vid = {w: i for i, w in enumerate(vocab)}

    rows, cols = [], []
    for s in sentences:
        ids = [vid.get(t, -1) for t in s]
        for i, a in enumerate(ids):
            if a < 0:
                continue
            for j in range(max(0, i - args.window), min(len(ids), i + args.window + 1)):
                b = ids[j]
                if j != i and b >= 0:
                    rows.append(a)
                    cols.append(b)
    n = len(vocab)
    co = sp.coo_matrix((np.ones(len(rows), dtype=np.float64), (rows, cols)),
                       shape=(n, n)).tocsr()
    co.sum_duplicates()
    total = co.sum()
    row_sum = np.asarray(co.sum(axis=1)).ravel()
    col_sum = np.asarray(co.sum(axis=0)).ravel() ** 0.75
    col_sum /= col_sum.sum()
    co = co.tocoo()
    pmi = np.log(co.data * 1.0 / total) - np.log(row_sum[co.row] / total) - np.log(col_sum[co.col])
    keep = pmi > 0
    ppmi = sp.csr_matrix((pmi[keep], (co.row[keep], co.col[keep])), shape=(n, n))
    u, s, _ = svds(ppmi, k=args.dim, random_state=7)
    order = np.argsort(-s)
    emb = u[:, order] * np.sqrt(s[order])
    emb /= np.abs(emb).max()

    res = os.path.join(args.out, "data", "resources", "desk")
    lex = os.path.join(args.out, "data", "lexicons")
    os.makedirs(res, exist_ok=True)
    os.makedirs(lex, exist_ok=True)

    with open(os.path.join(res, "embeddings.txt"), "w") as fh:
        for w, vec in zip(vocab, emb):
            fh.write(w + " " + " ".join("%.4f" % x for x in vec) + "\n")

    with open(os.path.join(res, "frequency.tsv"), "w") as fh:
        for w, c in sorted(freq.items(), key=lambda kv: (-kv[1], kv[0])):
            if c >= 2:
                fh.write("%s\t%d\n" % (w, c))

    # ---- taxonomy: single-word hyponyms (first two senses) -> hypernym heads
    pairs = set()
    noun_index = index["n"]
    for lemma, (_, _, offsets) in noun_index.items():
        if "_" in lemma or not re.fullmatch(r"[a-z][a-z-]*", lemma):
            continue
        for off in offsets[:2]:
            rec = synsets.get(("n", off))
            if rec is None:
                continue
            for sym, hoff, hpos in rec["ptrs"]:
                if sym not in ("@", "@i"):
                    continue
                h = synsets.get((hpos, hoff))
                if h is None:
                    continue
                for hw in h["words"][:3]:
                    hh = head(hw)
                    if hh != lemma and re.fullmatch(r"[a-z][a-z-]*", hh):
                        pairs.add((lemma, hh))
    pairs = {(a, b) for (a, b) in pairs if (b, a) not in pairs}
    with open(os.path.join(res, "taxonomy.tsv"), "w") as fh:
        for a, b in sorted(pairs):
            fh.write("%s\t%s\n" % (a, b))

    # ---- KB: part/substance meronymy as (part, relation, whole) triples
    rel_name = {"%p": "part_of", "%s": "substance_of", "%m": "member_of"}
    triples = set()
    for (pos, off), rec in synsets.items():
        if pos != "n":
            continue
        for sym, hoff, hpos in rec["ptrs"]:
            if sym not in rel_name:
                continue
            other = synsets.get((hpos, hoff))
            if other is None:
                continue
            # pointer on the whole: %p means "rec has part other"
            for whole in rec["words"][:2]:
                for part in other["words"][:2]:
                    triples.add((part.replace("_", " "), rel_name[sym], whole.replace("_", " ")))
    with open(os.path.join(res, "kb.tsv"), "w") as fh:
        for t in sorted(triples):
            fh.write("\t".join(t) + "\n")

    # ---- school vocabulary and body-part noun phrases
    school = collections.Counter()
    body = set()
    for (pos, off), rec in synsets.items():
        if pos != "n":
            continue
        for w in rec["words"]:
            words = w.split("_")
            surface = " ".join(words)
            if not all(re.fullmatch(r"[a-z]+", x) for x in words):
                continue
            if rec["lexfile"] == 8 and len(words) <= 3:
                body.add(surface)
            if rec["lexfile"] in SCHOOL_LEXNAMES and len(words) <= 2 and all(x in vid for x in words):
                school[surface] = max(school[surface], min(freq[x] for x in words))
    with open(os.path.join(res, "school_vocab.txt"), "w") as fh:
        for w, _ in sorted(school.items(), key=lambda kv: (-kv[1], kv[0]))[:6000]:
            fh.write(w + "\n")
    with open(os.path.join(res, "kb_noun_phrases.txt"), "w") as fh:
        for w in sorted(body):
            fh.write(w + "\n")

    # ---- open-class POS lexicon
    tags = collections.defaultdict(list)
    for pos in ("n", "v", "a", "r"):
        for lemma, (tagsense, synset_cnt, _) in index[pos].items():
            if not re.fullmatch(r"[a-z][a-z-]*", lemma):
                continue
            if freq[lemma] == 0 and tagsense == 0:
                continue
            tags[lemma].append((tagsense, synset_cnt, POS_TAG[pos]))
    for exc, tag in (("noun.exc", "NOUN"), ("verb.exc", "VERB")):
        with open(os.path.join(wn, exc), encoding="latin-1") as fh:
            for line in fh:
                f = line.split()
                if len(f) >= 2 and re.fullmatch(r"[a-z]+", f[0]) and freq[f[0]] > 0:
                    tags[f[0]].append((0, 0, tag))
    with open(os.path.join(lex, "pos_open_class.tsv"), "w") as fh:
        fh.write("# word<TAB>tags ordered by corpus sense frequency; generated from WordNet 3.0\n")
        for w in sorted(tags):
            seen = []
            for _, _, t in sorted(tags[w], key=lambda x: (-x[0], -x[1])):
                if t not in seen:
                    seen.append(t)
            fh.write("%s\t%s\n" % (w, ",".join(seen)))

    print("vocab", n, "taxonomy", len(pairs), "kb", len(triples),
          "school", min(len(school), 6000), "body", len(body), "lexicon", len(tags))


if __name__ == "__main__":
    main()
