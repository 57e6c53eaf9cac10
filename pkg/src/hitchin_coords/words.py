"""Words in surface-group generators.

A word is a tuple of letters ``(name, exponent)`` with exponent +1 or -1.
The text form separates letters by spaces and marks inverses with ``^-1``,
for example ``"a b^-1 c"``; the empty string is the identity.
"""

from .errors import InputError


def parse_word(text):
    if isinstance(text, (list, tuple)):
        return tuple((str(name), int(e)) for name, e in text)
    if not isinstance(text, str):
        raise InputError(f"word must be a string, got {text!r}")
    letters = []
    for token in text.split():
        if token.endswith("^-1"):
            letters.append((token[:-3], -1))
        elif token.endswith("^1"):
            letters.append((token[:-2], 1))
        else:
            letters.append((token, 1))
        if not letters[-1][0] or "^" in letters[-1][0]:
            raise InputError(f"malformed letter {token!r} in word {text!r}")
    return tuple(letters)


def format_word(word):
    return " ".join(name if e == 1 else f"{name}^-1" for name, e in word)


def inverse_word(word):
    return tuple((name, -e) for name, e in reversed(word))


def reduce_word(word):
    """Free reduction (cancel adjacent x x^-1 pairs)."""
    out = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def concat(*words):
    return reduce_word(tuple(letter for w in words for letter in w))


def power(word, k):
    if k < 0:
        return power(inverse_word(word), -k)
    return reduce_word(word * k)


def cyclic_reduce(word):
    word = list(reduce_word(word))
    while len(word) >= 2 and word[0][0] == word[-1][0] and word[0][1] == -word[-1][1]:
        word = word[1:-1]
    return tuple(word)


def exponent_sums(word):
    sums = {}
    for name, e in word:
        sums[name] = sums.get(name, 0) + e
    return sums


def substitute(word, images):
    """Replace every generator named in ``images`` by its image word."""
    out = []
    for name, e in word:
        if name in images:
            image = images[name]
            out.extend(image if e == 1 else inverse_word(image))
        else:
            out.append((name, e))
    return reduce_word(tuple(out))


def letters_used(word):
    return {name for name, _ in word}
