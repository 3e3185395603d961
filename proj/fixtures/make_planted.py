#!/usr/bin/env python3
"""Regenerates planted.obo / planted.gaf.

Three groups of ten products. Each product is annotated to one or two leaves
of its group's branch; some products also carry a noise annotation (the
general branch, or a leaf of another group). Deterministic for a given seed.
"""
import random
import sys
from pathlib import Path

SEED = 0

BP = [
    ("GO:0000001", "biological process root", []),
    ("GO:0000010", "group one process", [("is_a", "GO:0000001")]),
    ("GO:0000020", "group two process", [("is_a", "GO:0000001")]),
    ("GO:0000030", "group three process", [("is_a", "GO:0000001")]),
    ("GO:0000011", "group one leaf a", [("is_a", "GO:0000010")]),
    ("GO:0000012", "group one leaf b", [("is_a", "GO:0000010")]),
    ("GO:0000013", "group one leaf c", [("is_a", "GO:0000010"), ("is_a", "GO:0000040")]),
    ("GO:0000021", "group two leaf a", [("is_a", "GO:0000020")]),
    ("GO:0000022", "group two leaf b", [("is_a", "GO:0000020")]),
    ("GO:0000023", "group two leaf c", [("part_of", "GO:0000020")]),
    ("GO:0000031", "group three leaf a", [("is_a", "GO:0000030")]),
    ("GO:0000032", "group three leaf b", [("is_a", "GO:0000030")]),
    ("GO:0000033", "group three leaf c", [("is_a", "GO:0000030")]),
    ("GO:0000040", "general process", [("is_a", "GO:0000001")]),
    ("GO:0000041", "general process child", [("is_a", "GO:0000040")]),
]
MF = [
    ("GO:0003674", "molecular function root", []),
    ("GO:0003700", "binding activity", [("is_a", "GO:0003674")]),
    ("GO:0003800", "catalytic activity", [("is_a", "GO:0003674")]),
]
CC = [
    ("GO:0005575", "cellular component root", []),
    ("GO:0005600", "membrane", [("is_a", "GO:0005575")]),
]

LEAVES = [
    ["GO:0000011", "GO:0000012", "GO:0000013"],
    ["GO:0000021", "GO:0000022", "GO:0000023"],
    ["GO:0000031", "GO:0000032", "GO:0000033"],
]
NOISE = ["GO:0000041", "GO:0000040"]


def write_obo(path):
    lines = ["format-version: 1.2", "ontology: planted", ""]
    for terms, ns in ((BP, "biological_process"), (MF, "molecular_function"), (CC, "cellular_component")):
        for tid, name, parents in terms:
            lines += ["[Term]", f"id: {tid}", f"name: {name}", f"namespace: {ns}"]
            for rel, target in parents:
                if rel == "is_a":
                    lines.append(f"is_a: {target}")
                else:
                    lines.append(f"relationship: {rel} {target}")
            lines.append("")
    path.write_text("\n".join(lines))


def gaf_row(acc, term, aspect, qualifier=""):
    cols = ["FIX", acc, acc, qualifier, term, "REF:0001", "IDA", "", aspect,
            f"{acc} protein", "", "protein", "taxon:9606", "20140601", "FIX"]
    return "\t".join(cols)


def write_gaf(path, rng):
    rows = ["!gaf-version: 2.1", "!planted-partition fixture; see make_planted.py"]
    for i in range(30):
        group = i // 10
        acc = f"P{i + 1:02d}"
        own = rng.sample(LEAVES[group], rng.choice([1, 2]))
        for term in own:
            rows.append(gaf_row(acc, term, "P"))
        r = rng.random()
        if r < 0.3:
            rows.append(gaf_row(acc, rng.choice(NOISE), "P"))
        elif r < 0.45:
            other = rng.choice([g for g in range(3) if g != group])
            rows.append(gaf_row(acc, rng.choice(LEAVES[other]), "P"))
        if rng.random() < 0.5:
            rows.append(gaf_row(acc, rng.choice(["GO:0003700", "GO:0003800"]), "F"))
        if rng.random() < 0.3:
            rows.append(gaf_row(acc, "GO:0005600", "C"))
    # Rows the parser must skip: a NOT qualifier and an unknown term.
    rows.append(gaf_row("P01", "GO:0000033", "P", "NOT|involved_in"))
    rows.append(gaf_row("P02", "GO:9999999", "P"))
    path.write_text("\n".join(rows) + "\n")


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    rng = random.Random(SEED)
    write_obo(out / "planted.obo")
    write_gaf(out / "planted.gaf", rng)


if __name__ == "__main__":
    main()
