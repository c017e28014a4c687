#!/usr/bin/env python3
"""Generates the shipped demo corpus and prompt list.

Original synthetic prose from a seeded template grammar. The phrasing is
chain-structured on purpose: inside a phrase each word strongly determines the
next (easy for any Markov order), while the word after a determiner depends on
the two words before it ("by the ..." vs "over the ..."), which a k=3 model
resolves and a k=1 model cannot. The template set is kept small so that every
trigram context recurs often enough to dominate the additive-smoothing floor;
otherwise a k=3 model wanders into unseen contexts and degenerates to uniform
sampling mid-generation.

Usage: python3 scripts/gen_corpus.py [out_dir]
"""

import random
import sys
from pathlib import Path

SEED = 20240817
N_SENTENCES = 20000
N_PROMPTS = 32

# subject -> action chains; every action embeds a "<prep> the <noun> <noun>"
# slot whose noun pair is specific to the action.
GRAMMAR = {
    "fisherman": [
        "mends his nets by the harbor wall",
        "rows his skiff across the quiet bay",
        "salts the herring in the oak barrels",
    ],
    "shepherd": [
        "leads his flock over the stony pass",
        "counts the lambs beside the low wall",
        "rests at noon under the twisted pine",
    ],
    "heron": [
        "stands alone in the shallow water",
        "stalks the minnows along the reed bed",
        "glides at dusk over the misty marsh",
    ],
    "miller": [
        "grinds the grain between the worn stones",
        "stacks the sacks by the oak door",
        "greets the farmers at the open gate",
    ],
    "trader": [
        "drives his mules along the coast road",
        "weighs the figs on the brass scale",
        "haggles for cloth in the market square",
    ],
    "baker": [
        "kneads the dough on the floured board",
        "rakes the embers from the brick oven",
        "sells the loaves through the front hatch",
    ],
}

OPENERS = [
    "early in the morning",
    "late in the evening",
    "soon after the rain",
    "just before the frost",
]

TAILS = [
    "while the village sleeps",
    "until the light fades",
    "as the bells ring",
    "when the fog lifts",
]

CODAS = [
    "and the day goes on",
    "and nothing is wasted",
    "as it always was",
    "and the work gets done",
]


def sentence(rng: random.Random) -> str:
    kind = rng.choice(sorted(GRAMMAR))
    parts = ["the " + kind, rng.choice(GRAMMAR[kind])]
    roll = rng.random()
    if roll < 0.30:
        parts.insert(0, rng.choice(OPENERS))
    elif roll < 0.50:
        parts.append(rng.choice(TAILS))
    if rng.random() < 0.25:
        parts.append(rng.choice(CODAS))
    return " ".join(parts) + " ."


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)

    sentences = [sentence(rng) for _ in range(N_SENTENCES)]
    (out_dir / "corpus.txt").write_text("\n".join(sentences) + "\n", encoding="utf-8")

    prompt_rng = random.Random(SEED + 1)
    prompts = [sentence(prompt_rng) for _ in range(N_PROMPTS)]
    (out_dir / "prompts.txt").write_text("\n".join(prompts) + "\n", encoding="utf-8")

    words = " ".join(sentences).split()
    print(f"corpus: {len(sentences)} sentences, {len(words)} tokens, "
          f"{len(set(words))} distinct words")


if __name__ == "__main__":
    main()
