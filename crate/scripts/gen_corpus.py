#!/usr/bin/env python3
"""Build the bundled trilingual mini-corpora under data/corpus/.

Sources (fetch the two archives with
`pip download --no-deps jieba==0.42.1 konlpy==0.6.0`):

  en.txt  prose paragraphs from CPython's pydoc_data/topics.py (Python 3.10),
          split into sentences and normalised to upper-case letters,
          apostrophes and single spaces.
  ko.txt  the Constitution of the Republic of Korea and ten National Assembly
          bills shipped in konlpy's data directory; normalised to Hangul
          syllables and single spaces, split into sentences and long
          sentences chunked to at most 14 words.
  zh.txt  sentences sampled word by word from jieba's dictionary, weighted
          by the dictionary frequency; Han characters only, words separated
          by a single space.

Usage: gen_corpus.py JIEBA_TARBALL KONLPY_WHEEL
"""

import pathlib
import random
import re
import sys
import tarfile
import zipfile

SEED = 20250114
LINES = 1000


def english_lines(rng):
    from pydoc_data.topics import topics

    sentences = []
    for key in sorted(topics):
        paragraphs = re.split(r"\n\s*\n", topics[key])
        for para in paragraphs:
            lines = para.split("\n")
            # skip code blocks, grammar and headings
            if any(l.startswith(" ") for l in lines) or set(lines[-1]) <= set("*=-"):
                continue
            text = " ".join(lines)
            for sent in re.split(r"(?<=[.!?])\s+", text):
                words = re.sub(r"[^A-Za-z' ]+", " ", sent).upper().split()
                words = [w.strip("'") for w in words if w.strip("'")]
                if 5 <= len(words) <= 30:
                    sentences.append(" ".join(words))
    sentences = sorted(set(sentences))
    rng.shuffle(sentences)
    return sentences[:LINES]


def korean_lines(rng, wheel):
    z = zipfile.ZipFile(wheel)
    names = sorted(n for n in z.namelist() if n.startswith("konlpy/data/corpus/") and n.endswith(".txt"))
    sentences = []
    for name in names:
        text = z.read(name).decode("utf-8")
        # bills are hard-wrapped with blank lines; a trailing space marks a
        # break between words, otherwise the wrap split a word
        text = re.sub(r" \n\n(?=\S)", " ", text)
        text = re.sub(r"(?<=[가-힣])\n\n(?=[가-힣])", "", text)
        for sent in re.split(r"(?<=[.다])\s+|\n", text):
            words = re.sub(r"[^가-힣 ]+", " ", sent).split()
            while len(words) > 14:
                sentences.append(" ".join(words[:12]))
                words = words[12:]
            if len(words) >= 3:
                sentences.append(" ".join(words))
    sentences = sorted(set(sentences))
    rng.shuffle(sentences)
    return sentences[:LINES]


def chinese_lines(rng, tarball):
    t = tarfile.open(tarball)
    member = next(m for m in t.getmembers() if m.name.endswith("jieba/dict.txt"))
    words, weights = [], []
    for line in t.extractfile(member).read().decode("utf-8").splitlines():
        word, freq, _ = line.split(" ")
        if all("一" <= c <= "鿿" for c in word):
            words.append(word)
            weights.append(int(freq))
    out = []
    for _ in range(LINES):
        n = rng.randint(4, 12)
        out.append(" ".join(rng.choices(words, weights, k=n)))
    return out


def main():
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    jieba, konlpy = sys.argv[1:]
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "corpus"
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    corpora = {
        "en": english_lines(rng),
        "ko": korean_lines(rng, konlpy),
        "zh": chinese_lines(rng, jieba),
    }
    for tag, lines in corpora.items():
        (out / f"{tag}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(tag, len(lines))


if __name__ == "__main__":
    main()
