#!/usr/bin/env python3
"""Writes the sample phonetic-class cost matrix shipped in data/costs.csv.

Costs are hand-set by broad phonetic class with a few closer pairs; they are
a stand-in for a properly derived similarity matrix.
"""
import sys

INVENTORY = [
    "AA", "AE", "AH", "AO", "AW", "AY", "B", "CH", "D", "DH",
    "EH", "ER", "EY", "F", "G", "HH", "IH", "IY", "JH", "K",
    "L", "M", "N", "NG", "OW", "OY", "P", "R", "S", "SH",
    "T", "TH", "UH", "UW", "V", "W", "Y", "Z", "ZH", "<eps>",
]

CLASSES = {
    "vowel": "AA AE AH AO AW AY EH ER EY IH IY OW OY UH UW",
    "stop": "B D G K P T",
    "affricate": "CH JH",
    "fricative": "DH F HH S SH TH V Z ZH",
    "nasal": "M N NG",
    "approximant": "L R W Y",
}
CLASS_OF = {p: c for c, ps in CLASSES.items() for p in ps.split()}

CLOSE_PAIRS = {
    0.3: ["IH IY", "UH UW"],
    0.4: ["EH AE", "AH AA", "AO AA", "P B", "T D", "K G", "F V", "S Z",
          "SH ZH", "TH DH", "CH JH"],
    0.45: ["EH IH", "TH S", "TH T", "DH D", "ZH JH", "EY EH", "OW AO"],
    0.5: ["AH ER", "AW OW", "AY OY", "DH Z", "Z JH", "CH SH", "S SH", "L R",
          "W V", "N M", "N NG", "AH IH", "AH UH", "AA ER"],
    0.6: ["Y IY", "W UW", "AW AO"],
}

DELETION = {"HH": 0.3, "AH": 0.5, "T": 0.6, "D": 0.6}
INSERTION = {"AH": 0.4, "IH": 0.6}
DEFAULT_INDEL = 0.8


def cost(a, b):
    if a == b:
        return 0.0
    if b == "<eps>":
        return DELETION.get(a, DEFAULT_INDEL)
    if a == "<eps>":
        return INSERTION.get(b, DEFAULT_INDEL)
    for value, pairs in CLOSE_PAIRS.items():
        for pair in pairs:
            x, y = pair.split()
            if {a, b} == {x, y}:
                return value
    if CLASS_OF[a] == CLASS_OF[b]:
        return 0.7
    return 1.0


def main(out):
    out.write("expected\\observed," + ",".join(INVENTORY) + "\n")
    for a in INVENTORY:
        out.write(a + "," + ",".join(f"{cost(a, b):g}" for b in INVENTORY) + "\n")


if __name__ == "__main__":
    main(sys.stdout)
