#!/usr/bin/env python3
"""Writes the small NER fixture corpora used by the tests.

Output is deterministic for a given seed. Run from this directory:

    python3 generate_fixtures.py && python3 count_tags.py

The fixtures mimic the source formats: IOB Marathi with long class names,
flat Hindi with the full IJCNLP class inventory (some lines carry an extra
POS column or use spaces), and WikiAnn dumps with `hi:`/`mr:` prefixes.
"""
import random

SEED = 20211

MR_WORDS = """आणि या ते आहे होते केले मध्ये साठी येथे आज काल नवीन मोठा शहरात
सरकार निवडणूक बैठक लोक त्यांनी सांगितले झाली होती पाणी शाळा रस्ता
वर्ष दिवस पुढील काम विकास प्रकल्प मंत्री अध्यक्ष खेळ सामना गावात
नंतर पहिल्यांदा सर्व काही मात्र तसेच म्हणून कारण""".split()
HI_WORDS = """और यह वह है था किया में लिए यहाँ आज कल नया बड़ा शहर
सरकार चुनाव बैठक लोग उन्होंने कहा हुई थी पानी स्कूल सड़क
साल दिन अगले काम विकास परियोजना मंत्री अध्यक्ष खेल मैच गाँव
बाद पहली सभी कुछ लेकिन साथ इसलिए क्योंकि""".split()
ENGLISH = ["cricket", "online", "IPL", "Facebook", "2008", "15", "%", "school"]

PERSONS = [["सचिन", "तेंडुलकर"], ["लता", "मंगेशकर"], ["शरद", "पवार"], ["नरेंद्र", "मोदी"],
           ["अमिताभ", "बच्चन"], ["सुनील", "गावस्कर"], ["राहुल"], ["प्रिया"]]
ORGS = [["भारतीय", "रेल्वे"], ["टाटा", "मोटर्स"], ["रिझर्व्ह", "बँक"], ["इसरो"],
        ["संयुक्त", "राष्ट्र"], ["बीसीसीआय"]]
LOCS = [["पुणे"], ["मुंबई"], ["दिल्ली"], ["नागपूर"], ["महाराष्ट्र"], ["उत्तर", "प्रदेश"],
        ["भारत"], ["गंगा"], ["कोल्हापूर"]]

IITB = {"P": "PERSON", "O": "ORGANISATION", "L": "LOCATION"}
WIKI = {"P": "PER", "O": "ORG", "L": "LOC"}
IJCNLP_OTHER = ["NETI", "NETE", "NEA", "NED", "NEM", "NEN", "NETO"]


def sentence(rng, words):
    """A list of (token, kind) with kind in P/O/L/None plus span position."""
    out = []
    n = rng.randint(3, 14)
    for _ in range(n):
        r = rng.random()
        if r < 0.08:
            kind, lex = "P", PERSONS
        elif r < 0.12:
            kind, lex = "O", ORGS
        elif r < 0.22:
            kind, lex = "L", LOCS
        else:
            out.append((rng.choice(words + ENGLISH[:2] if rng.random() < 0.1 else words), None, 0))
            continue
        for i, w in enumerate(rng.choice(lex)):
            out.append((w, kind, i))
    return out


def write(path, sents):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for lines in sents:
            for line in lines:
                f.write(line + "\n")
            f.write("\n")


def iob_lines(sent, classes, prefix="", dangling=False, space_every=0):
    lines = []
    for k, (tok, kind, pos) in enumerate(sent):
        if kind is None:
            tag = "O"
        else:
            tag = ("I-" if pos > 0 else "B-") + classes[kind]
        if dangling and k == 0 and kind is not None:
            tag = "I-" + classes[kind]
        sep = "  " if space_every and k % space_every == space_every - 1 else "\t"
        lines.append(f"{prefix}{tok}{sep}{tag}")
    return lines


def flat_lines(rng, sent):
    lines = []
    for tok, kind, _ in sent:
        if kind is None:
            tag = rng.choice(IJCNLP_OTHER) if rng.random() < 0.06 else "O"
        else:
            tag = "NE" + kind
        r = rng.random()
        if r < 0.05:
            lines.append(f"{tok}\tNN\t{tag}")
        elif r < 0.1:
            lines.append(f"{tok}   {tag}")
        else:
            lines.append(f"{tok}\t{tag}")
    return lines


def main():
    rng = random.Random(SEED)
    for split, n in [("train", 200), ("test", 80), ("tune", 40)]:
        write(f"iitb_mr.{split}.txt",
              [iob_lines(sentence(rng, MR_WORDS), IITB, space_every=11) for _ in range(n)])
    for split, n in [("train", 200), ("test", 80)]:
        write(f"ijcnlp_hi.{split}.txt", [flat_lines(rng, sentence(rng, HI_WORDS)) for _ in range(n)])
    for lang, words in [("hi", HI_WORDS), ("mr", MR_WORDS)]:
        sents = []
        for i in range(150):
            s = sentence(rng, words)
            sents.append(iob_lines(s, WIKI, prefix=f"{lang}:", dangling=(i % 37 == 5)))
        write(f"wikiann_{lang}.txt", sents)
    write("overfit_mr.txt", [iob_lines(sentence(rng, MR_WORDS), IITB) for _ in range(50)])


if __name__ == "__main__":
    main()
