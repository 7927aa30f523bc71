from typing import List

from vivada.constants import ABBREVIATIONS, LAST_WORD_RE, NUMBERED_ABBREVIATIONS, SENTENCE_END_RE, WORD_RE
from vivada.strings import squash


def tokenize(text: str) -> List[str]:
    """Lowercased runs of letters and digits; everything else separates."""
    return WORD_RE.findall(text.lower())


def _is_abbreviation(prefix: str, following: str) -> bool:
    match = LAST_WORD_RE.search(prefix)
    if match is None:
        return False
    word = match.group(1).lower()
    if word in NUMBERED_ABBREVIATIONS:
        return following.lstrip(" \t")[:1].isdigit()
    return word in ABBREVIATIONS


def split_sentences(text: str) -> List[str]:
    sentences = []
    start = 0
    for match in SENTENCE_END_RE.finditer(text):
        terminator = match.group(0)
        if terminator == "." and _is_abbreviation(text[start : match.start()], text[match.end() :]):
            continue
        sentence = squash(text[start : match.start()])
        if sentence:
            sentences.append(sentence)
        start = match.end()

    tail = squash(text[start:])
    if tail:
        sentences.append(tail)
    return sentences
