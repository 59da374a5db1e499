#!/usr/bin/env python3
"""Generate the synthetic sample norms under data/.

The public thematic-fit norm sets cannot be bundled, so these files are
deterministic stand-ins with the same shape: McRae-style 1,444 rows with
exactly 8 duplicate (predicate, argument, role) tuples, Pado-style 414
rows adding Arg2, and the two Ferretti-style sets (Instrument, Location)
where many Location arguments carry an indefinite article. Ratings imitate
averaged 1-7 Likert judgments.

Run from the repo root: python3 scripts/make_sample_data.py
"""

from __future__ import annotations

import random
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "data"

VERBS = [
    "eat", "drink", "cut", "serve", "teach", "advise", "encourage", "inform",
    "build", "repair", "paint", "wash", "carry", "throw", "catch", "drive",
    "ride", "read", "write", "sing", "play", "cook", "bake", "grow",
    "plant", "harvest", "hunt", "chase", "clean", "polish", "sharpen", "fold",
    "wrap", "open", "close", "lock", "push", "pull", "lift", "drop",
    "study", "examine", "measure", "weigh", "pour", "stir", "slice", "grill",
    "boil", "fry", "freeze", "heat", "sell", "buy", "rent", "borrow",
    "lend", "steal", "guard", "protect", "attack", "defend", "train", "coach",
    "interview", "hire", "fire", "promote", "punish", "reward", "praise", "blame",
    "visit", "invite", "greet", "thank", "warn", "remind", "convince", "persuade",
]

NOUNS = [
    "pizza", "apple", "bread", "cheese", "soup", "salad", "steak", "rice",
    "coffee", "juice", "water", "wine", "knife", "fork", "spoon", "scissors",
    "hammer", "saw", "drill", "wrench", "brush", "sponge", "towel", "rope",
    "ladder", "bucket", "basket", "box", "bag", "bottle", "jar", "plate",
    "teacher", "student", "doctor", "nurse", "farmer", "baker", "butcher", "chef",
    "waiter", "client", "customer", "reader", "writer", "singer", "driver", "pilot",
    "hunter", "guard", "soldier", "coach", "lawyer", "judge", "clerk", "manager",
    "child", "parent", "friend", "neighbor", "guest", "stranger", "crowd", "team",
    "book", "letter", "report", "ticket", "card", "photo", "map", "poster",
    "car", "truck", "bicycle", "boat", "train", "wagon", "tractor", "sled",
    "garden", "field", "orchard", "barn", "stable", "shed", "fence", "gate",
    "wall", "roof", "floor", "window", "door", "table", "chair", "bench",
    "shirt", "coat", "hat", "glove", "scarf", "boot", "blanket", "curtain",
    "piano", "guitar", "violin", "drum", "flute", "radio", "camera", "clock",
]

LOCATIONS = [
    "mall", "office", "kitchen", "restaurant", "library", "classroom", "park",
    "beach", "forest", "garage", "attic", "basement", "garden", "market",
    "stadium", "theater", "museum", "airport", "station", "harbor", "hotel",
    "hospital", "church", "factory", "farm", "bakery", "cafe", "bar",
    "gym", "pool", "playground", "zoo", "aquarium", "campus", "plaza",
    "alley", "avenue", "bridge", "tunnel", "tower", "castle", "cabin",
    "cottage", "apartment", "studio", "workshop", "warehouse", "cellar",
    "balcony", "porch", "yard", "meadow", "valley", "hill", "island",
    "desert", "canyon", "cave", "cliff", "shore", "dock", "pier",
    "arcade", "auditorium", "ballroom", "chapel", "clinic", "diner",
]

INSTRUMENTS = [
    "knife", "fork", "spoon", "scissors", "hammer", "saw", "drill", "wrench",
    "brush", "sponge", "mop", "broom", "rake", "shovel", "hoe", "axe",
    "razor", "needle", "thread", "glue", "tape", "stapler", "pen", "pencil",
    "chalk", "marker", "eraser", "ruler", "compass", "protractor", "calculator",
    "ladle", "whisk", "grater", "peeler", "tongs", "spatula", "skewer",
    "rope", "chain", "pulley", "lever", "crowbar", "jack", "clamp", "vise",
    "net", "trap", "hook", "rod", "spear", "bow", "sling", "lasso",
    "towel", "cloth", "rag", "duster", "vacuum", "polisher", "sander",
]


def rating(rng: random.Random) -> str:
    return f"{rng.uniform(1.0, 7.0):.1f}"


def write_tsv(path: Path, name: str, rows: list[tuple[str, str, str, str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("dataset\tpredicate\targument\trole\trating\n")
        for predicate, argument, role, score in rows:
            fh.write(f"{name}\t{predicate}\t{argument}\t{role}\t{score}\n")
    print(f"wrote {path} ({len(rows)} rows)")


def unique_triples(rng: random.Random, nouns: list[str], roles: list[str], count: int):
    triples = set()
    while len(triples) < count:
        triples.add((rng.choice(VERBS), rng.choice(nouns), rng.choice(roles)))
    ordered = sorted(triples)
    rng.shuffle(ordered)
    return ordered


def make_mcrae(rng: random.Random) -> list[tuple[str, str, str, str]]:
    triples = unique_triples(rng, NOUNS, ["Arg0", "Arg1"], 1436)
    rows = [(p, a, r, rating(rng)) for p, a, r in triples]
    # Eight duplicate tuples: half repeat the rating, half conflict.
    duplicates = rng.sample(rows, 8)
    for i, (p, a, r, score) in enumerate(duplicates):
        duplicate_score = score if i < 4 else rating(rng)
        rows.insert(rng.randrange(len(rows) + 1), (p, a, r, duplicate_score))
    assert len(rows) == 1444
    return rows


def make_pado(rng: random.Random) -> list[tuple[str, str, str, str]]:
    triples = unique_triples(rng, NOUNS, ["Arg0", "Arg1", "Arg2"], 414)
    return [(p, a, r, rating(rng)) for p, a, r in triples]


def make_fer_ins(rng: random.Random) -> list[tuple[str, str, str, str]]:
    triples = unique_triples(rng, INSTRUMENTS, ["Instrument"], 248)
    return [(p, a, r, rating(rng)) for p, a, r in triples]


def make_fer_loc(rng: random.Random) -> list[tuple[str, str, str, str]]:
    triples = unique_triples(rng, LOCATIONS, ["Location"], 274)
    rows = []
    for predicate, argument, role in triples:
        # The source phrasing kept indefinite articles on most arguments.
        if rng.random() < 0.8:
            article = "an" if argument[0] in "aeiou" else "a"
            argument = f"{article} {argument}"
        rows.append((predicate, argument, role, rating(rng)))
    return rows


def main() -> None:
    rng = random.Random(20240331)
    write_tsv(OUT_DIR / "mcrae.tsv", "mcrae", make_mcrae(rng))
    write_tsv(OUT_DIR / "pado.tsv", "pado", make_pado(rng))
    write_tsv(OUT_DIR / "fer_ins.tsv", "fer_ins", make_fer_ins(rng))
    write_tsv(OUT_DIR / "fer_loc.tsv", "fer_loc", make_fer_loc(rng))


if __name__ == "__main__":
    main()
