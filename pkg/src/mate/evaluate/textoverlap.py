"""Surface-overlap scores for feedback text: BLEU-4 and ROUGE-1/2/L."""

from __future__ import annotations

import math
import re
from collections import Counter

from ..errors import ValidationError

_WORD_RE = re.compile(r"\w+", re.UNICODE)

# Han, kana, and hangul blocks: scripts written without spaces, where word
# tokens would otherwise swallow whole sentences.
_UNSPACED_RANGES = (
    (0x3040, 0x30FF),
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xAC00, 0xD7AF),
    (0xF900, 0xFAFF),
    (0x20000, 0x2A6DF),
)


def _is_unspaced(ch: str) -> bool:
    code = ord(ch)
    return any(lo <= code <= hi for lo, hi in _UNSPACED_RANGES)


def tokenize(text: str) -> list[str]:
    """Case-fold and split on whitespace/punctuation; characters from scripts
    written without spaces become single-character tokens."""
    tokens: list[str] = []
    for word in _WORD_RE.findall(text.casefold()):
        if not any(_is_unspaced(ch) for ch in word):
            tokens.append(word)
            continue
        run = ""
        for ch in word:
            if _is_unspaced(ch):
                if run:
                    tokens.append(run)
                    run = ""
                tokens.append(ch)
            else:
                run += ch
        if run:
            tokens.append(run)
    return tokens


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(candidate: str, reference: str) -> float:
    """Geometric mean of modified 1..4-gram precisions with a brevity penalty.

    A zero (or empty) clipped count for some n falls back to 1/(denominator+1)
    so the score degrades smoothly instead of collapsing to 0.
    """
    ref_tokens = tokenize(reference)
    if not ref_tokens:
        raise ValidationError("bleu4 requires a non-empty reference")
    cand_tokens = tokenize(candidate)
    if not cand_tokens:
        return 0.0
    log_sum = 0.0
    for n in range(1, 5):
        cand_counts = _ngram_counts(cand_tokens, n)
        ref_counts = _ngram_counts(ref_tokens, n)
        clipped = sum(min(count, ref_counts[gram]) for gram, count in cand_counts.items())
        denom = max(len(cand_tokens) - n + 1, 0)
        precision = clipped / denom if clipped else 1.0 / (denom + 1)
        log_sum += math.log(precision)
    c, r = len(cand_tokens), len(ref_tokens)
    brevity = math.exp(1.0 - r / c) if c < r else 1.0
    return brevity * math.exp(log_sum / 4.0)


def _f1(overlap: float, pred_total: int, ref_total: int) -> float:
    precision = overlap / pred_total if pred_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for token in a:
        current = [0]
        for j, other in enumerate(b, start=1):
            if token == other:
                current.append(prev[j - 1] + 1)
            else:
                current.append(max(prev[j], current[j - 1]))
        prev = current
    return prev[-1]


def rouge(candidate: str, reference: str) -> dict[str, float]:
    """ROUGE-1/2 F1 over n-gram overlap and ROUGE-L F1 over the LCS."""
    ref_tokens = tokenize(reference)
    if not ref_tokens:
        raise ValidationError("rouge requires a non-empty reference")
    cand_tokens = tokenize(candidate)
    if not cand_tokens:
        return {"rouge1": 0.0, "rouge2": 0.0, "rougeL": 0.0}
    scores = {}
    for n, key in ((1, "rouge1"), (2, "rouge2")):
        cand_counts = _ngram_counts(cand_tokens, n)
        ref_counts = _ngram_counts(ref_tokens, n)
        overlap = sum(min(count, ref_counts[gram]) for gram, count in cand_counts.items())
        scores[key] = _f1(overlap, sum(cand_counts.values()), sum(ref_counts.values()))
    lcs = _lcs_length(cand_tokens, ref_tokens)
    scores["rougeL"] = _f1(lcs, len(cand_tokens), len(ref_tokens))
    return scores
