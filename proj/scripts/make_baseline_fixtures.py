"""Writes the overlap-baseline fixtures under tests/fixtures/baseline/.

dominance.jsonl  50 questions whose support passage holds the answer verbatim
                 and none of the distractor words, and whose answer words occur
                 in no other passage.
shuffled.jsonl   200 questions whose distractors are drawn from other
                 questions' distractors.
passages.jsonl   paragraph store with every support passage.
"""
import json
import random
import re
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures" / "baseline"


def words(text):
    return re.findall(r"[a-z0-9]+", text.lower())


def contains(passage, phrase):
    p, w = words(passage), words(phrase)
    return any(p[i:i + len(w)] == w for i in range(len(p) - len(w) + 1))


def record(rid, q, a, ds):
    return {"id": rid, "question": q, "correct_answer": a,
            "distractor1": ds[0], "distractor2": ds[1], "distractor3": ds[2],
            "support": None, "split": "unassigned",
            "origins": ["human", "human", "human"], "option_seed": 7}


def main():
    rows = []
    for line in (ROOT / "data" / "questions" / "science_questions.tsv").read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        f = line.split("\t")
        rows.append((f[0], f[1], f[2:5], f[5]))

    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "passages.jsonl", "w") as out:
        for i, (_, _, _, support) in enumerate(rows):
            out.write(json.dumps({"id": f"s{i + 1:04d}", "book_id": "questions", "text": support,
                                  "exportable": True, "used": False, "sentences": []}) + "\n")

    vocab = [set(words(r[3])) for r in rows]
    dominant = [r for r in rows
                if contains(r[3], r[1]) and not any(set(words(d)) & set(words(r[3])) for d in r[2])
                and sum(set(words(r[1])) <= v for v in vocab) == 1]
    with open(OUT / "dominance.jsonl", "w") as out:
        for i, (q, a, ds, _) in enumerate(dominant[:50]):
            out.write(json.dumps(record(f"dom-{i + 1:03d}", q, a, ds)) + "\n")

    rng = random.Random(20)
    picked = rng.sample(range(len(rows)), 200)
    pool = [d for r in rows for d in r[2]]
    with open(OUT / "shuffled.jsonl", "w") as out:
        for n, i in enumerate(picked):
            q, a, own, _ = rows[i]
            taken = {a.lower()}
            ds = []
            while len(ds) < 3:
                d = rng.choice(pool)
                if d.lower() not in taken and d not in own:
                    taken.add(d.lower())
                    ds.append(d)
            out.write(json.dumps(record(f"shf-{n + 1:03d}", q, a, ds)) + "\n")
    print(len(rows), "questions,", len(dominant), "dominant")


if __name__ == "__main__":
    main()
