#!/usr/bin/env python3
"""Regenerates the bundled test fixtures under tests/fixtures.

Output is a pure function of SEED, so re-running leaves the files unchanged.
"""

import argparse
import json
import random
from pathlib import Path

SEED = 20240611

LANGS = ["de", "el", "es", "fr", "it", "nl", "pt", "ru", "ta", "tr"]

SYLLABLES = [
    "ka", "vel", "mor", "dan", "ri", "tho", "sel", "ar", "bren", "cal", "dor", "en",
    "fal", "gar", "hol", "is", "jun", "ket", "lum", "mav", "nor", "ost", "pel", "quin",
    "ros", "sta", "tor", "ul", "var", "wen", "yor", "zan", "bel", "cor", "dre", "el",
]

PLACE_SUFFIX = ["", "", " Bay", " Hills", " Valley", " Harbour"]
ORG_SUFFIX = [" Institute", " Society", " Company", " Museum", " University", " Records"]

RELATIONS = [
    ("P17", "country"),
    ("P19", "place of birth"),
    ("P27", "country of citizenship"),
    ("P36", "capital"),
    ("P50", "author"),
    ("P108", "employer"),
    ("P131", "located in the administrative territorial entity"),
    ("P159", "headquarters location"),
    ("P166", "award received"),
    ("P463", "member of"),
    ("P569", "date of birth"),
    ("P571", "inception"),
]

MONTHS = ["January", "February", "March", "April", "May", "June", "July",
          "August", "September", "October", "November", "December"]

CYRILLIC = dict(zip("abcdefghijklmnopqrstuvwxyz", "абкдефгхийклмнопкрстувввыз"))
GREEK = dict(zip("abcdefghijklmnopqrstuvwxyz", "αβκδεφγηιξκλμνοπκρστυββξυζ"))
TAMIL = dict(zip("abcdefghijklmnopqrstuvwxyz", "அபகடஎஃகஹஇஜகலமநஒபகரஸதஉவவஷயழ"))


def word(rng, parts):
    return "".join(rng.choice(SYLLABLES) for _ in range(parts)).capitalize()


def transliterate(text, table):
    out = []
    for ch in text:
        low = ch.lower()
        mapped = table.get(low, ch)
        out.append(mapped.upper() if ch.isupper() else mapped)
    return "".join(out)


def localized(title, lang):
    if lang == "ru":
        return transliterate(title, CYRILLIC)
    if lang == "el":
        return transliterate(title, GREEK)
    if lang == "ta":
        return transliterate(title, TAMIL)
    words = title.split(" ")
    if lang == "de":
        words = [w.replace("c", "k").replace("C", "K").replace("v", "w") for w in words]
    elif lang == "fr":
        words = [w.replace("e", "é", 1) for w in words]
    elif lang == "es":
        words = [w + "o" if w[-1] not in "aeiou" else w for w in words]
    elif lang == "it":
        words = [w + "a" if w[-1] not in "aeiou" else w for w in words]
    elif lang == "nl":
        words = [w.replace("a", "aa", 1) for w in words]
    elif lang == "pt":
        words = [w.replace("o", "õ", 1) for w in words]
    elif lang == "tr":
        words = [w.replace("i", "ı").replace("s", "ş", 1) for w in words]
    return " ".join(words)


def make_kb(rng):
    kinds = ["person"] * 70 + ["place"] * 70 + ["org"] * 60
    titles, entities = set(), []
    for i, kind in enumerate(kinds):
        while True:
            if kind == "person":
                title = f"{word(rng, 2)} {word(rng, rng.choice([2, 3]))}"
            elif kind == "place":
                title = word(rng, rng.choice([2, 3])) + rng.choice(PLACE_SUFFIX)
            else:
                title = word(rng, 2) + rng.choice(ORG_SUFFIX)
            if title not in titles:
                titles.add(title)
                break
        qid = f"Q{1000 + i}"
        if rng.random() < 0.08:
            langs = []
        else:
            langs = [lang for lang in LANGS if rng.random() < 0.8]
        labels = {"en": title}
        for lang in langs:
            labels[lang] = localized(title, lang)
        entities.append({"id": qid, "kind": kind, "title": title, "labels": labels})
    return entities


def make_triples(rng, entities):
    by_kind = {}
    for e in entities:
        by_kind.setdefault(e["kind"], []).append(e["id"])
    people, places, orgs = by_kind["person"], by_kind["place"], by_kind["org"]
    triples = set()
    for p in people:
        triples.add((p, "P19", rng.choice(places)))
        if rng.random() < 0.5:
            triples.add((p, "P108", rng.choice(orgs)))
        if rng.random() < 0.3:
            triples.add((p, "P27", rng.choice(places)))
        if rng.random() < 0.3:
            triples.add((p, "P569", str(rng.randint(1900, 2000))))
    for pl in places:
        if rng.random() < 0.6:
            triples.add((pl, "P131", rng.choice(places)))
        if rng.random() < 0.2:
            triples.add((pl, "P36", rng.choice(places)))
    for o in orgs:
        triples.add((o, "P159", rng.choice(places)))
        triples.add((o, "P571", str(rng.randint(1850, 2020))))
        if rng.random() < 0.3:
            triples.add((o, "P463", rng.choice(orgs)))
    return sorted(t for t in triples if t[0] != t[2])


def write_kb(out, entities, triples):
    kb = out / "kb"
    kb.mkdir(parents=True, exist_ok=True)
    with open(kb / "entities.tsv", "w", encoding="utf-8", newline="\n") as f:
        for e in entities:
            f.write(f"{e['id']}\t__title__\t{e['title']}\n")
            for lang in sorted(e["labels"]):
                f.write(f"{e['id']}\t{lang}\t{e['labels'][lang]}\n")
    with open(kb / "relations.tsv", "w", encoding="utf-8", newline="\n") as f:
        for rid, label in RELATIONS:
            f.write(f"{rid}\t{label}\n")
    with open(kb / "triples.tsv", "w", encoding="utf-8", newline="\n") as f:
        for h, r, t in triples:
            f.write(f"{h}\t{r}\t{t}\n")


FILLER = ["the", "region", "was", "known", "for", "its", "old", "archives", "and",
          "quiet", "streets", "during", "many", "long", "winters", "near", "river",
          "markets", "where", "traders", "met", "each", "spring"]

LINK_TEMPLATES = {
    1: ["{0} was mentioned in several local reports that year.",
        "Records describe {0} as a busy place for many decades.",
        "In the spring the committee visited {0} for two weeks."],
    2: ["{0} worked closely with {1} for many years.",
        "After the war {0} moved to {1} with the family.",
        "The report compared {0} and {1} in some detail."],
    3: ["{0} met {1} at {2} during the summer.",
        "Letters from {0} reached {1} by way of {2} that autumn.",
        "The archive links {0} with {1} and {2} in three files."],
}


def sentence_case(text):
    return text[0].upper() + text[1:]


def link(rng, e):
    if rng.random() < 0.15:
        display = e["title"].split(" ")[0]
        return f"[[{e['title']}|{display}]]"
    return f"[[{e['title']}]]"


def make_wiki(rng, entities):
    sentences = []
    pattern = [1, 2, 3, 2]
    for i in range(460):
        k = pattern[i % 4]
        chosen = rng.sample(entities, k)
        template = rng.choice(LINK_TEMPLATES[k])
        text = template.format(*(link(rng, e) for e in chosen))
        if i % 37 == 5:
            body = text if text.startswith("[[") else text[0].lower() + text[1:]
            text = "The poet J. K. Morrow wrote that " + body
        sentences.append(text)
    for _ in range(25):
        n = rng.randint(6, 14)
        words = [rng.choice(FILLER) for _ in range(n)]
        sentences.append(sentence_case(" ".join(words)) + ".")
    for _ in range(15):
        n = rng.randint(130, 160)
        words = [rng.choice(FILLER) for _ in range(n)]
        words[rng.randint(3, n - 3)] = link(rng, rng.choice(entities))
        sentences.append(sentence_case(" ".join(words)) + ".")
    rng.shuffle(sentences)
    docs = []
    for d in range(50):
        docs.append({"doc_id": f"wiki{d:03d}", "text": " ".join(sentences[d * 10:(d + 1) * 10])})
    return docs


def relations_between(triples, h, t):
    return sorted(r for (a, r, b) in triples if a == h and b == t)


def sentence_record(sent_id, parts):
    """parts: list of str words or (surface, title, kb_id) mention tuples."""
    words, mentions = [], []
    for part in parts:
        if isinstance(part, str):
            words.extend(part.split(" "))
            continue
        surface, title, kb_id = part
        toks = surface.split(" ")
        m = {"start": len(words), "end": len(words) + len(toks), "surface": surface, "title": title}
        if kb_id is not None:
            m["kb_id"] = kb_id
        mentions.append(m)
        words.extend(toks)
    return {"sent_id": sent_id, "words": words, "mentions": mentions}


def make_web(rng, entities, triples):
    by_id = {e["id"]: e for e in entities}
    rel_label = dict(RELATIONS)
    entity_pairs = [(h, r, t) for (h, r, t) in triples if t in by_id]
    year_triples = [(h, r, t) for (h, r, t) in triples if t not in by_id]
    connected = {(h, t) for (h, _, t) in triples} | {(t, h) for (h, _, t) in triples}

    def mention(e, with_id):
        return (e["title"], e["title"], e["id"] if with_id else None)

    records, scores = [], []
    n = 0

    def add(parts):
        nonlocal n
        rec = sentence_record(f"web{n:04d}", parts)
        records.append(rec)
        n += 1
        return rec

    for i in range(100):
        if i % 5 == 4:
            h, r, year = rng.choice(year_triples)
            date = f"{rng.choice(MONTHS)} {rng.randint(1, 28)}, {year}"
            rec = add([mention(by_id[h], True), "was established on", (date, date, None),
                       "according to the annual report of the city council"])
            pairs = [(by_id[h]["title"], rel_label[r], year) for r in relations_between(triples, h, year)]
        else:
            h, r, t = rng.choice(entity_pairs)
            rec = add(["According to the local newspaper", mention(by_id[h], i % 3 != 0),
                       "has long been associated with", mention(by_id[t], True), "in public records"])
            pairs = [(by_id[h]["title"], rel_label[x], by_id[t]["title"])
                     for x in relations_between(triples, h, t)]
            pairs += [(by_id[t]["title"], rel_label[x], by_id[h]["title"])
                      for x in relations_between(triples, t, h)]
        for head, rel, tail in pairs:
            # Every sixth sentence gets a low entailment score and ends up negative.
            low = int(rec["sent_id"][3:]) % 6 == 0
            for hyp in range(2):
                score = round(rng.uniform(0.05, 0.69), 2) if low else \
                    (round(rng.uniform(0.72, 0.99), 2) if hyp == 0 else round(rng.uniform(0.0, 0.6), 2))
                scores.append({"sent_id": rec["sent_id"],
                               "triple": {"head": head, "relation": rel, "tail": tail},
                               "score": score})
    for i in range(70):
        if i % 3 == 0:
            add(["Visitors often describe the old market square as noisy but",
                 "charming in the early hours of the morning"])
        else:
            e = rng.choice(entities)
            add(["Many residents still remember how", mention(e, True),
                 "looked before the new roads were built"])
    made = 0
    while made < 70:
        a, b, c = rng.sample(entities, 3)
        ids = [a["id"], b["id"], c["id"]]
        if any((x, y) in connected for x in ids for y in ids if x != y):
            continue
        add(["Reports from", mention(a, True), "and", mention(b, True),
             "rarely mention", mention(c, True), "in the same breath"])
        made += 1
    # A few entailment scores sit exactly on the threshold.
    for s in scores[:6]:
        s["score"] = 0.7
    return records, scores


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "fixtures"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)

    entities = make_kb(rng)
    triples = make_triples(rng, entities)
    write_kb(out, entities, triples)

    def write_jsonl(name, rows):
        with open(out / name, "w", encoding="utf-8", newline="\n") as f:
            for row in rows:
                f.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n")

    write_jsonl("wiki_mini.jsonl", make_wiki(rng, entities))
    web, scores = make_web(rng, entities, triples)
    write_jsonl("web_linked.jsonl", web)
    write_jsonl("nli_scores.jsonl", scores)

    with open(out / "entity_labels.txt", "w", encoding="utf-8", newline="\n") as f:
        for title in sorted(e["title"] for e in entities):
            f.write(title + "\n")
    with open(out / "relation_labels.txt", "w", encoding="utf-8", newline="\n") as f:
        for _, label in sorted(RELATIONS, key=lambda r: r[1]):
            f.write(label + "\n")
    with open(out / "lang_counts.tsv", "w", encoding="utf-8", newline="\n") as f:
        for lang, count in [("de", 2400000), ("el", 180000), ("en", 6000000), ("es", 1700000),
                            ("fr", 2200000), ("ta", 140000), ("tr", 500000), ("yo", 0)]:
            f.write(f"{lang}\t{count}\n")


if __name__ == "__main__":
    main()
