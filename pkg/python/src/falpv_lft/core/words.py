import itertools
from collections.abc import Iterator, Sequence

from falpv_lft.models.errors import ErrorCode, LftError
from falpv_lft.models.types import EMPTY_WORD, Word


def validate_word(word: Sequence[int], alphabet: int) -> Word:
    """Return ``word`` as a tuple, checking every letter lies in ``1..alphabet``."""
    word = tuple(int(letter) for letter in word)
    for letter in word:
        if not 1 <= letter <= alphabet:
            raise LftError.of(
                ErrorCode.ALPHABET,
                f"Letter {letter} of word {format_word(word)} outside 1..{alphabet}",
                word=list(word),
                alphabet=alphabet,
            )
    return word


def shift_word(word: Sequence[int], offset: int = 1) -> Word:
    """Shift every letter by ``offset``; the default maps the scheduling letters onto blocks 2..n_p+1."""
    return tuple(letter + offset for letter in word)


def iter_words(alphabet: int, max_length: int, *, min_length: int = 0) -> Iterator[Word]:
    """Every word over ``1..alphabet`` by increasing length, lexicographic within one length."""
    for length in range(min_length, max_length + 1):
        if length == 0:
            yield EMPTY_WORD
            continue
        yield from itertools.product(range(1, alphabet + 1), repeat=length)


def format_word(word: Sequence[int]) -> str:
    if len(word) == 0:
        return "ε"
    return " ".join(str(letter) for letter in word)
