"""Regenerates corpus.conllu: 200 year-stamped sentences over 6 lemmas."""

import random

FILLER = {
    "amod": "xin", "det": "zhe", "nmod": "shehui", "case": "zai",
    "nsubj": "women", "obj": "wenti", "advmod": "hen", "cc": "he",
}

# (incoming label, dependents before the vehicle, dependents after)
SHAPES = {
    "subject": ("nsubj", ["amod"], []),
    "object": ("obj", ["det"], ["nmod"]),
    "conjunct": ("conj", ["cc"], []),
    "clause": ("root", ["nsubj"], ["obj"]),
    "oblique": ("obl", ["case"], []),
}

SMALL = ["chao", "lianyin", "miaozhun", "liangxiang", "chongci"]
BIG = "jingen"


def sentence(rng, sid, year, lemma, shape):
    label, before, after = SHAPES[shape]
    tokens = []  # (form, lemma, upos, head placeholder, deprel)
    verb = None
    if label not in ("root", "nsubj"):
        tokens.append(["shi", "shi", "VERB", 0, "root"])
        verb = 1
    for dep in before:
        tokens.append([FILLER[dep], FILLER[dep], "X", "V", dep])
    tokens.append([lemma, lemma, "NOUN", verb or 0, label])
    core = len(tokens)
    for dep in after:
        tokens.append([FILLER[dep], FILLER[dep], "X", "V", dep])
    if label == "nsubj":
        tokens.append(["faxian", "faxian", "VERB", 0, "root"])
        verb = len(tokens)
        tokens[core - 1][3] = verb
    if label == "root":
        tokens[core - 1][4] = "root"
    lines = [f"# sent_id = {sid}", f"# year = {year}"]
    for i, (form, lem, upos, head, rel) in enumerate(tokens, 1):
        head = core if head == "V" else head
        lines.append(f"{i}\t{form}\t{lem}\t{upos}\t_\t_\t{head}\t{rel}\t_\t_")
    return "\n".join(lines) + "\n"


def main():
    rng = random.Random(7)
    plan = []
    for n, lemma in enumerate(SMALL):
        base = 1950 + 3 * n
        for shape, offset, count in (("subject", 0, 12), ("object", 12, 8), ("conjunct", 25, 7)):
            for _ in range(count):
                plan.append((base + offset + rng.randrange(0, 15), lemma, shape))
    for shape, count, start in (
        ("subject", 20, 1947), ("object", 15, 1958), ("conjunct", 12, 1975),
        ("clause", 10, 1962), ("oblique", 8, 1980),
    ):
        for _ in range(count):
            plan.append((start + rng.randrange(0, 20), BIG, shape))
    assert len(plan) == 200
    rng.shuffle(plan)
    blocks = [sentence(rng, f"s{i:03d}", year, lemma, shape) for i, (year, lemma, shape) in enumerate(plan, 1)]
    with open("corpus.conllu", "w", encoding="utf-8") as f:
        f.write("\n".join(blocks) + "\n")


if __name__ == "__main__":
    main()
