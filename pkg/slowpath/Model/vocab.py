"""
Fixed toy vocabulary: control symbols, digits, event classes and enough
question words to phrase counting prompts.
"""

import numpy as np

from slowpath.errors import InvalidArgumentError

TOKENS = (
    "<pad>", "<bos>", "<eos>", "?",
    "0", "1", "2", "3", "4", "5", "6", "7", "8", "9",
    "ring", "beep", "knock", "chirp", "silence",
    "how", "many", "times", "does", "the", "phone", "count", "is", "there",
    "a", "an", "sound", "event", "what", "which", "heard", "yes", "no",
    "first", "last", "before", "after", "and", "or", "of", "in", "it",
    "audio", "clip", "answer", "none", "more", "less", "than", "time",
    "loud", "quiet", "short", "long", "fast", "slow", "tone", "bell", "door", "sec",
)

PAD, BOS, EOS, QUESTION = 0, 1, 2, 3
TOKEN_TO_ID = {token: index for index, token in enumerate(TOKENS)}
VOCAB_SIZE = len(TOKENS)
DIGIT_IDS = tuple(TOKEN_TO_ID[str(d)] for d in range(10))


def token_id(token):
    """Id of a token string; integers are passed through after a range check."""
    if isinstance(token, (int, np.integer)):
        if not 0 <= token < VOCAB_SIZE:
            raise InvalidArgumentError(f"token id {token} outside vocabulary of {VOCAB_SIZE}")
        return int(token)
    try:
        return TOKEN_TO_ID[token]
    except KeyError:
        raise InvalidArgumentError(f"unknown token {token!r}")


def tokenize(text):
    """Split on whitespace and map each word to its id."""
    if isinstance(text, str):
        text = text.split()
    return [token_id(token) for token in text]


def detokenize(ids):
    """Join token strings with spaces."""
    return " ".join(TOKENS[i] for i in ids)


def check_ids(ids, vocab_size=VOCAB_SIZE):
    """Raise InvalidArgumentError unless every id is a valid vocabulary index."""
    for i in ids:
        if not isinstance(i, (int, np.integer)) or not 0 <= i < vocab_size:
            raise InvalidArgumentError(f"unknown token id {i!r}")
