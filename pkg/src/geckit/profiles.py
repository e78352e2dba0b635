"""Language profiles steering the corruption operations.

A profile fixes the weights of the token- and character-level operations,
the clipped-normal parameters for the per-sentence error probabilities,
the alphabet used for character draws, and (where applicable) a
diacritics table.  Built-in profiles exist for en, cs, de and ru;
external JSON files override a built-in field by field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .errors import ValidationError

__all__ = [
    "ErrorRate",
    "LanguageProfile",
    "TOKEN_OPS",
    "CHAR_OPS",
    "builtin_profile",
    "builtin_languages",
    "load_profile",
    "save_profile",
]

TOKEN_OPS = ("substitute", "insert", "delete", "swap", "recase")
CHAR_OPS = ("substitute", "insert", "delete", "recase", "toggle_diacritics")

_WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class ErrorRate:
    """Parameters of a normal distribution clipped to [0, 1]."""

    mean: float
    std: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.mean <= 1.0:
            raise ValidationError(f"error-rate mean {self.mean} outside [0, 1]")
        if self.std < 0.0:
            raise ValidationError(f"error-rate std {self.std} must be >= 0")


def _check_weights(weights: dict[str, float], expected: tuple[str, ...],
                   what: str) -> dict[str, float]:
    missing = [op for op in expected if op not in weights]
    extra = [op for op in weights if op not in expected]
    if missing or extra:
        raise ValidationError(
            f"{what} must define exactly {expected}; "
            f"missing={missing} unexpected={extra}")
    for op, w in weights.items():
        if not 0.0 <= w <= 1.0:
            raise ValidationError(f"{what}[{op}] = {w} outside [0, 1]")
    total = sum(weights[op] for op in expected)
    if abs(total - 1.0) > _WEIGHT_TOL:
        raise ValidationError(f"{what} weights sum to {total!r}, expected 1")
    # canonical key order so iteration (and op drawing) is deterministic
    return {op: float(weights[op]) for op in expected}


@dataclass(frozen=True)
class LanguageProfile:
    """Per-language constants for the noiser.

    token_ops / char_ops map operation names to probabilities summing to
    one.  diacritics_map maps a base character to its diacritized
    variants; both lookup directions are used by the toggle operation.
    """

    lang: str
    token_ops: dict[str, float]
    char_ops: dict[str, float]
    word_err: ErrorRate
    char_err: ErrorRate
    alphabet: tuple[str, ...]
    diacritics_map: dict[str, tuple[str, ...]]

    def __post_init__(self) -> None:
        if not self.lang:
            raise ValidationError("profile lang must be non-empty")
        object.__setattr__(
            self, "token_ops", _check_weights(self.token_ops, TOKEN_OPS,
                                              f"{self.lang} token_ops"))
        object.__setattr__(
            self, "char_ops", _check_weights(self.char_ops, CHAR_OPS,
                                             f"{self.lang} char_ops"))
        # alphabet: deduplicated, sorted for deterministic indexing
        alphabet = tuple(sorted(set(self.alphabet)))
        for ch in alphabet:
            if len(ch) != 1:
                raise ValidationError(f"alphabet entry {ch!r} is not one character")
        object.__setattr__(self, "alphabet", alphabet)
        dia: dict[str, tuple[str, ...]] = {}
        for base, variants in self.diacritics_map.items():
            if len(base) != 1:
                raise ValidationError(f"diacritics base {base!r} is not one character")
            var = tuple(sorted(set(variants)))
            if not var:
                raise ValidationError(f"diacritics entry {base!r} has no variants")
            if base in var:
                raise ValidationError(f"diacritics variant equals base {base!r}")
            dia[base] = var
        object.__setattr__(self, "diacritics_map", dia)
        if self.char_ops["toggle_diacritics"] > 0.0 and not dia:
            raise ValidationError(
                f"{self.lang}: toggle_diacritics weight > 0 needs a diacritics_map")

    @cached_property
    def _toggle_table(self) -> dict[str, tuple[str, ...]]:
        options: dict[str, set[str]] = {}
        for base, variants in self.diacritics_map.items():
            options.setdefault(base, set()).update(variants)
            for v in variants:
                options.setdefault(v, set()).add(base)
        return {ch: tuple(sorted(opts)) for ch, opts in options.items()}

    def toggle_options(self, ch: str) -> tuple[str, ...]:
        """Characters `ch` may become under the diacritics toggle."""
        return self._toggle_table.get(ch, ())


# Operation weights in TOKEN_OPS / CHAR_OPS order.
_BUILTIN_TOKEN_OPS = {
    "en": (0.60, 0.20, 0.10, 0.05, 0.05),
    "cs": (0.70, 0.10, 0.05, 0.10, 0.05),
    "de": (0.64, 0.20, 0.10, 0.01, 0.05),
    "ru": (0.65, 0.10, 0.10, 0.10, 0.05),
}
_BUILTIN_CHAR_OPS = {
    "en": (0.25, 0.25, 0.25, 0.25, 0.0),
    "cs": (0.20, 0.20, 0.20, 0.20, 0.20),
    "de": (0.25, 0.25, 0.25, 0.25, 0.0),
    "ru": (0.25, 0.25, 0.25, 0.25, 0.0),
}
_BUILTIN_ALPHABETS = {
    "en": "abcdefghijklmnopqrstuvwxyz",
    "cs": "abcdefghijklmnopqrstuvwxyzáčďéěíňóřšťúůýž",
    "de": "abcdefghijklmnopqrstuvwxyzäöüß",
    "ru": "абвгдеёжзийклмнопрстуфхцчшщъыьэюя",
}

_CZECH_DIACRITICS_LOWER = {
    "a": ("á",),
    "c": ("č",),
    "d": ("ď",),
    "e": ("é", "ě"),
    "i": ("í",),
    "n": ("ň",),
    "o": ("ó",),
    "r": ("ř",),
    "s": ("š",),
    "t": ("ť",),
    "u": ("ú", "ů"),
    "y": ("ý",),
    "z": ("ž",),
}


def _both_cases(mapping: dict[str, tuple[str, ...]]) -> dict[str, tuple[str, ...]]:
    out = dict(mapping)
    for base, variants in mapping.items():
        out[base.upper()] = tuple(v.upper() for v in variants)
    return out


_BUILTIN_DIACRITICS = {
    "en": {},
    "cs": _both_cases(_CZECH_DIACRITICS_LOWER),
    "de": {},
    "ru": {},
}

DEFAULT_WORD_ERR = ErrorRate(mean=0.15, std=0.2)
DEFAULT_CHAR_ERR = ErrorRate(mean=0.02, std=0.01)


def builtin_languages() -> tuple[str, ...]:
    return tuple(sorted(_BUILTIN_TOKEN_OPS))


def builtin_profile(lang: str) -> LanguageProfile:
    """Return the built-in profile for a language code.

    Raises ValidationError for languages without a built-in profile.
    """
    if lang not in _BUILTIN_TOKEN_OPS:
        known = ", ".join(builtin_languages())
        raise ValidationError(
            f"no built-in profile for language {lang!r} (available: {known})")
    return LanguageProfile(
        lang=lang,
        token_ops=dict(zip(TOKEN_OPS, _BUILTIN_TOKEN_OPS[lang])),
        char_ops=dict(zip(CHAR_OPS, _BUILTIN_CHAR_OPS[lang])),
        word_err=DEFAULT_WORD_ERR,
        char_err=DEFAULT_CHAR_ERR,
        alphabet=tuple(_BUILTIN_ALPHABETS[lang]),
        diacritics_map=_BUILTIN_DIACRITICS[lang],
    )


def profile_to_dict(profile: LanguageProfile) -> dict:
    return {
        "lang": profile.lang,
        "token_ops": dict(profile.token_ops),
        "char_ops": dict(profile.char_ops),
        "word_err": {"mean": profile.word_err.mean, "std": profile.word_err.std},
        "char_err": {"mean": profile.char_err.mean, "std": profile.char_err.std},
        "alphabet": "".join(profile.alphabet),
        "diacritics_map": {b: list(v) for b, v in profile.diacritics_map.items()},
    }


def _rate_from(value, fallback: ErrorRate | None, what: str) -> ErrorRate:
    if value is None:
        if fallback is None:
            raise ValidationError(f"profile is missing required field {what!r}")
        return fallback
    if not isinstance(value, dict) or set(value) - {"mean", "std"}:
        raise ValidationError(f"{what} must be an object with 'mean' and 'std'")
    base_mean = fallback.mean if fallback else None
    base_std = fallback.std if fallback else None
    mean = value.get("mean", base_mean)
    std = value.get("std", base_std)
    if mean is None or std is None:
        raise ValidationError(f"{what} must define both 'mean' and 'std'")
    return ErrorRate(mean=float(mean), std=float(std))


def profile_from_dict(data: dict, base: LanguageProfile | None = None) -> LanguageProfile:
    """Build a profile from parsed JSON, overriding `base` field by field.

    When no base is given and the file names a language with a built-in
    profile, that built-in is the base; otherwise all fields are required.
    """
    if not isinstance(data, dict):
        raise ValidationError("profile JSON must be an object")
    lang = data.get("lang") or (base.lang if base else None)
    if not lang:
        raise ValidationError("profile is missing required field 'lang'")
    if base is None and lang in _BUILTIN_TOKEN_OPS:
        base = builtin_profile(lang)

    def field(name, fallback):
        value = data.get(name)
        if value is None:
            if fallback is None:
                raise ValidationError(f"profile is missing required field {name!r}")
            return fallback
        return value

    token_ops = field("token_ops", dict(base.token_ops) if base else None)
    char_ops = field("char_ops", dict(base.char_ops) if base else None)
    word_err = _rate_from(data.get("word_err"), base.word_err if base else None,
                          "word_err")
    char_err = _rate_from(data.get("char_err"), base.char_err if base else None,
                          "char_err")
    alphabet = field("alphabet", "".join(base.alphabet) if base else None)
    dia_raw = data.get("diacritics_map")
    if dia_raw is None:
        dia = dict(base.diacritics_map) if base else {}
    else:
        dia = {b: tuple(v) for b, v in dia_raw.items()}
    return LanguageProfile(
        lang=lang,
        token_ops={k: float(v) for k, v in dict(token_ops).items()},
        char_ops={k: float(v) for k, v in dict(char_ops).items()},
        word_err=word_err,
        char_err=char_err,
        alphabet=tuple(alphabet),
        diacritics_map=dia,
    )


def load_profile(path: str | Path, base: LanguageProfile | None = None) -> LanguageProfile:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid profile JSON: {exc}") from exc
    return profile_from_dict(data, base=base)


def save_profile(profile: LanguageProfile, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(profile_to_dict(profile), fh, ensure_ascii=False, indent=2)
        fh.write("\n")
