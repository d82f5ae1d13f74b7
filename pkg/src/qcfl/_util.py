from itertools import product


def words_up_to(alphabet, n):
    """Yield every word over ``alphabet`` of length <= n in shortlex order."""
    letters = sorted(alphabet)
    for length in range(n + 1):
        for w in product(letters, repeat=length):
            yield w


def fresh(base, taken):
    """Return ``base`` or a primed variant of it that is not in ``taken``."""
    name = base
    while name in taken:
        name += "'"
    return name


def as_word(w):
    if w is None:
        return ()
    return tuple(w)


def word_str(w, sep=""):
    return sep.join(w)
