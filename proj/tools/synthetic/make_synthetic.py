#!/usr/bin/env python3
# Copyright 2026 The instreplay Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the shipped 3-task synthetic corpus under data/synthetic.

Usage: make_synthetic.py --cli build/tools/instreplay [--out data/synthetic]

The CLI does the train/holdout split and the rule normalization of tags, so
tag embedding keys and instance ids always agree with what the pipeline sees.
"""

import argparse
import json
import pathlib
import subprocess
import tempfile

import numpy as np

DIM = 16
PER_TASK = 300
SEED = 20260101

# instruction text, relative weight, raw tags
TASKS = {
    "sentiment": [
        ("Classify the sentiment of the review as positive or negative.", 0.40,
         ["Sentiment Analysis", "Text Classification"]),
        ("Is the following review positive or negative?", 0.25,
         ["sentiment-analysis", "Opinion Mining"]),
        ("Decide whether the customer liked the product.", 0.15,
         ["Sentiment analysis", "Customer Feedback", "Product Reviews"]),
        ("Label the review with its polarity.", 0.10,
         ["Polarity Detection", "Labeling"]),
        ("Read the review and answer with positive or negative.", 0.10,
         ["Reading Comprehension", "sentiment analyses"]),
    ],
    "arith": [
        ("Add the two numbers.", 0.35, ["Arithmetic", "Addition"]),
        ("Compute the sum of the given integers.", 0.30,
         ["Mathematics", "arithmetic", "Summation"]),
        ("What is the result of the addition below?", 0.20,
         ["Math", "Question Answering"]),
        ("Solve the arithmetic problem and give only the number.", 0.15,
         ["Problem Solving", "Arithmetics", "Numerical Answers"]),
    ],
    "titlecase": [
        ("Rewrite the sentence in title case.", 0.30,
         ["Text Formatting", "Capitalization"]),
        ("Capitalize the first letter of every word.", 0.25,
         ["capitalisation", "Text Editing"]),
        ("Convert the text to title case.", 0.20,
         ["Text Transformation", "Title Casing"]),
        ("Format the phrase as a headline.", 0.15,
         ["Headline Writing", "Formatting"]),
        ("Apply title capitalization to the input.", 0.05,
         ["Capitalization", "Style Editing"]),
        ("Make each word start with an uppercase letter.", 0.05,
         ["Spelling & Grammar-Check", "Text Editing"]),
    ],
}

# Raw tags with the same meaning; members get nearby embeddings so the
# semantic merge at radius 0.1 joins them.
SYNONYMS = [
    ["Sentiment Analysis", "sentiment-analysis", "Sentiment analysis",
     "sentiment analyses", "Opinion Mining", "Polarity Detection"],
    ["Arithmetic", "arithmetic", "Arithmetics", "Addition", "Summation"],
    ["Mathematics", "Math"],
    ["Capitalization", "capitalisation", "Title Casing"],
    ["Text Formatting", "Formatting"],
    ["Text Editing", "Style Editing"],
]

ADJ = ["great", "terrible", "solid", "awful", "lovely", "poor", "fine", "bad"]
NOUN = ["battery", "screen", "service", "delivery", "fabric", "sound", "price"]
WORDS = ["river", "silent", "morning", "paper", "garden", "signal", "winter",
         "copper", "lantern", "harbor", "meadow", "engine", "violet", "orbit"]
POSITIVE = {"great", "solid", "lovely", "fine"}


def make_instance(task, rng):
    if task == "sentiment":
        adj = ADJ[rng.integers(len(ADJ))]
        noun = NOUN[rng.integers(len(NOUN))]
        text = f"The {noun} is {adj} and I would say so again."
        return text, "positive" if adj in POSITIVE else "negative"
    if task == "arith":
        a, b = int(rng.integers(0, 500)), int(rng.integers(0, 500))
        return f"{a} + {b}", str(a + b)
    n = int(rng.integers(3, 7))
    words = [WORDS[rng.integers(len(WORDS))] for _ in range(n)]
    return " ".join(words), " ".join(w.capitalize() for w in words)


def unit(v):
    return v / np.linalg.norm(v)


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_jsonl(path):
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def vec(v):
    return [round(float(x), 6) for x in v]


def degrade(reference, keep, rng):
    tokens = reference.split()
    kept = [t for t in tokens if rng.random() < keep]
    return " ".join(kept)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--out", default="data/synthetic")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)

    # Corpus: instructions drawn by weight, so histograms are skewed.
    corpus = []
    for task, instructions in TASKS.items():
        weights = np.array([w for _, w, _ in instructions])
        counts = np.floor(weights / weights.sum() * PER_TASK).astype(int)
        counts[0] += PER_TASK - counts.sum()
        order = np.repeat(np.arange(len(instructions)), counts)
        rng.shuffle(order)
        for k in order:
            inp, outp = make_instance(task, rng)
            corpus.append({"task_id": task, "instruction": instructions[k][0],
                           "input": inp, "output": outp})
    write_jsonl(out / "corpus.jsonl", corpus)

    # Instruction embeddings: task centroid plus per-instruction offset.
    centroids = {t: rng.normal(size=DIM) for t in TASKS}
    centroids["titlecase"] = 0.6 * centroids["titlecase"] + 0.4 * centroids["sentiment"]
    ins_emb = {}
    for task, instructions in TASKS.items():
        for ins, _, _ in instructions:
            ins_emb[ins] = centroids[task] + 0.45 * rng.normal(size=DIM)
    write_jsonl(out / "embeddings.jsonl",
                [{"key": k, "vector": vec(v)} for k, v in ins_emb.items()])

    write_jsonl(out / "tags_raw.jsonl",
                [{"key": ins, "tags": tags}
                 for instructions in TASKS.values() for ins, _, tags in instructions])

    with open(out / "categories.json", "w") as f:
        json.dump({"classification": ["sentiment"], "reasoning": ["arith"],
                   "rewriting": ["titlecase"]}, f, indent=2)
        f.write("\n")
    bounds = {"sentiment": 0.9, "arith": 0.85, "titlecase": 0.95}
    with open(out / "bounds.json", "w") as f:
        json.dump(bounds, f, indent=2)
        f.write("\n")

    subprocess.run([args.cli, "ingest", "--corpus", str(out / "corpus.jsonl"),
                    "--fraction", "0.2", "--seed", "7",
                    "--train-out", str(out / "train.jsonl"),
                    "--holdout-out", str(out / "holdout.jsonl")], check=True)

    # Instance embeddings for prototype-data: instruction vector plus an
    # input-dependent offset, keyed by instance id.
    train = read_jsonl(out / "train.jsonl")
    write_jsonl(out / "instance_embeddings.jsonl",
                [{"key": r["id"],
                  "vector": vec(ins_emb[r["instruction"]] + 0.3 * rng.normal(size=DIM))}
                 for r in train])

    # Tag embeddings keyed by rule-normalized tag.
    with tempfile.TemporaryDirectory() as tmp:
        map_path = pathlib.Path(tmp) / "map.json"
        subprocess.run([args.cli, "tags", "normalize", "--tags", str(out / "tags_raw.jsonl"),
                        "--out", str(pathlib.Path(tmp) / "rule.jsonl"),
                        "--map-out", str(map_path)], check=True)
        rule_map = json.loads(map_path.read_text())
    group_of = {raw: g for g, members in enumerate(SYNONYMS) for raw in members}
    bases = [unit(rng.normal(size=DIM)) for _ in SYNONYMS]
    tag_emb = {}
    for raw, normalized in sorted(rule_map.items()):
        if normalized in tag_emb:
            continue
        if raw in group_of:
            v = bases[group_of[raw]] + 0.03 * unit(rng.normal(size=DIM))
        else:
            v = rng.normal(size=DIM)
        tag_emb[normalized] = v
    write_jsonl(out / "tag_embeddings.jsonl",
                [{"key": k, "vector": vec(v)} for k, v in sorted(tag_emb.items())])

    # Predictions: each earlier task decays as later stages train.
    holdout = read_jsonl(out / "holdout.jsonl")
    order = ["sentiment", "arith", "titlecase"]
    preds = []
    for stage in range(1, len(order) + 1):
        for j, task in enumerate(order[:stage]):
            keep = 0.97 - 0.12 * (stage - 1 - j)
            for r in holdout:
                if r["task_id"] == task:
                    preds.append({"stage": stage, "task_id": task, "id": r["id"],
                                  "output": degrade(r["output"], keep, rng)})
    write_jsonl(out / "predictions.jsonl", preds)

    config = {
        "task_order": order,
        "alpha_per_task": 200,
        "strategy": "inscl",
        "mode": "real",
        "method": "exact",
        "seed": 42,
        "corpus": "train.jsonl",
        "embeddings": "embeddings.jsonl",
        "tags": "tags_raw.jsonl",
        "tag_embeddings": "tag_embeddings.jsonl",
        "instance_embeddings": "instance_embeddings.jsonl",
        "bounds": "bounds.json",
        "work_dir": "work",
    }
    with open(out / "config.json", "w") as f:
        json.dump(config, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
