"""Tests for seeded error injection.

The corpus-level checks compare the synthesizer against independent
Monte-Carlo simulations of the same sampling scheme, driven by a
different random generator.
"""

import logging
import pickle
import random
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from geckit import (ConfusionLexicon, NoiseConfig, ParseError, Sentence,
                    ValidationError, builtin_profile, corpus_error_rate,
                    corrupt_chars, corrupt_sentence, corrupt_word,
                    damerau_levenshtein, profile_from_dict,
                    propose_substitutions, record_rng, sample_error_prob,
                    synthesize_corpus, synthesize_corpus_parallel)
from helpers import cost_and_edges_oracle

TOKEN_OPS = ("substitute", "insert", "delete", "swap", "recase")
CHAR_OPS = ("substitute", "insert", "delete", "recase", "toggle_diacritics")

# E[clip(N(mu, sigma), 0, 1)] for the two default error-rate settings.
CLIPPED_WORD_MEAN = 0.1762329
CLIPPED_CHAR_MEAN = 0.0200849


def word_profile(op, **extra):
    ops = {name: 0.0 for name in TOKEN_OPS}
    ops[op] = 1.0
    spec = {"lang": "cs", "token_ops": ops,
            "char_err": {"mean": 0.0, "std": 0.0}}
    spec.update(extra)
    return profile_from_dict(spec)


def char_profile(op, mean=1.0, **extra):
    ops = {name: 0.0 for name in CHAR_OPS}
    ops[op] = 1.0
    spec = {"lang": "cs", "char_ops": ops,
            "word_err": {"mean": 0.0, "std": 0.0},
            "char_err": {"mean": mean, "std": 0.0}}
    spec.update(extra)
    return profile_from_dict(spec)


def quiet_profile(lang="cs"):
    # insert weight must be zero so no vocabulary is required
    ops = {name: 0.0 for name in TOKEN_OPS}
    ops["substitute"] = 1.0
    return profile_from_dict({"lang": lang, "token_ops": ops,
                              "word_err": {"mean": 0.0, "std": 0.0},
                              "char_err": {"mean": 0.0, "std": 0.0}})


def test_record_rng_deterministic_per_index():
    a = record_rng(42, 7).random(4)
    b = record_rng(42, 7).random(4)
    c = record_rng(42, 8).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, record_rng(43, 7).random(4))


def test_record_rng_validates_range():
    for seed, index in [(-1, 0), (2 ** 64, 0), (0, -1), (0, 2 ** 64)]:
        with pytest.raises(ValidationError):
            record_rng(seed, index)
    record_rng(2 ** 64 - 1, 2 ** 64 - 1)


def test_sample_error_prob_degenerate_cases():
    rng = record_rng(0, 0)
    assert sample_error_prob(rng, 0.15, 0.0) == 0.15
    assert sample_error_prob(rng, 0.0, 0.0) == 0.0
    assert sample_error_prob(rng, 1.0, 0.0) == 1.0


def test_sample_error_prob_validation():
    rng = record_rng(0, 0)
    with pytest.raises(ValidationError, match="mean"):
        sample_error_prob(rng, 1.5, 0.1)
    with pytest.raises(ValidationError, match="std"):
        sample_error_prob(rng, 0.5, -0.1)


def test_sample_error_prob_is_clipped_normal():
    draws = [sample_error_prob(record_rng(5, i), 0.15, 0.2)
             for i in range(500)]
    rng = record_rng(9, 0)
    scalar = [sample_error_prob(rng, 0.15, 0.2) for _ in range(500)]
    vector = np.clip(record_rng(9, 0).normal(0.15, 0.2, 500), 0.0, 1.0)
    assert all(0.0 <= d <= 1.0 for d in draws)
    assert 0.0 in draws          # the lower clip is actually reached
    assert scalar == pytest.approx(list(vector))


def clipped_mean_oracle(mu, sigma):
    a = (0.0 - mu) / sigma
    b = (1.0 - mu) / sigma
    return (mu * (norm.cdf(b) - norm.cdf(a))
            + sigma * (norm.pdf(a) - norm.pdf(b)) + (1.0 - norm.cdf(b)))


def test_clipped_mean_constants():
    assert clipped_mean_oracle(0.15, 0.2) == pytest.approx(CLIPPED_WORD_MEAN,
                                                           abs=1e-6)
    assert clipped_mean_oracle(0.02, 0.01) == pytest.approx(CLIPPED_CHAR_MEAN,
                                                            abs=1e-6)
    draws = np.clip(record_rng(123, 0).normal(0.15, 0.2, 10 ** 6), 0.0, 1.0)
    assert float(draws.mean()) == pytest.approx(CLIPPED_WORD_MEAN, abs=1e-3)


@pytest.mark.parametrize("a, b, expected", [
    ("", "", 0),
    ("", "abc", 3),
    ("abc", "", 3),
    ("abc", "abc", 0),
    ("kitten", "sitting", 3),
    ("ab", "ba", 1),
    ("ca", "abc", 3),
])
def test_damerau_levenshtein_examples(a, b, expected):
    assert damerau_levenshtein(a, b) == expected


def osa_oracle(a, b):
    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0 or j == 0:
            return max(i, j)
        best = min(d(i - 1, j) + 1, d(i, j - 1) + 1,
                   d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))
        if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
            best = min(best, d(i - 2, j - 2) + 1)
        return best

    result = d(len(a), len(b))
    d.cache_clear()
    return result


@settings(max_examples=300)
@given(st.text("abc", max_size=8), st.text("abc", max_size=8))
def test_damerau_levenshtein_matches_recursive_oracle(a, b):
    assert damerau_levenshtein(a, b) == osa_oracle(a, b)
    assert damerau_levenshtein(a, b) == damerau_levenshtein(b, a)
    assert (damerau_levenshtein(a, b) == 0) == (a == b)


def test_lexicon_distance_candidates():
    lex = ConfusionLexicon(vocabulary=["kap", "kit", "xyz"])
    assert lex.candidates("kat") == ("kap", "kit")
    assert propose_substitutions("kat", lex) == ("kap", "kit")
    assert propose_substitutions("kat", None) == ()


def test_lexicon_candidate_ordering():
    lex = ConfusionLexicon(vocabulary=[("katka", 9.0), ("kit", 1.0),
                                       ("kot", 5.0)])
    # distance first (kot/kit at 1 beat katka at 2), then higher frequency
    assert lex.candidates("kat") == ("kot", "kit", "katka")


def test_lexicon_excludes_the_word_itself():
    lex = ConfusionLexicon(vocabulary=["kat", "kap"])
    assert lex.candidates("kat") == ("kap",)
    assert lex.candidates("KAT") == ("kap",)


def test_lexicon_proposals_override_vocabulary():
    lex = ConfusionLexicon(vocabulary=["kap"], proposals={"kat": ("cat",)})
    assert lex.candidates("kat") == ("cat",)
    assert lex.candidates("kit") == ("kap",)


def test_lexicon_rejects_self_proposal():
    with pytest.raises(ValidationError, match="equals its key"):
        ConfusionLexicon(proposals={"kat": ("kat",)})
    with pytest.raises(ValidationError, match="max_edit_distance"):
        ConfusionLexicon(max_edit_distance=0)


def test_lexicon_random_word():
    assert ConfusionLexicon().random_word(record_rng(0, 0)) is None
    lex = ConfusionLexicon(vocabulary=[("never", 0.0), ("always", 5.0)])
    drawn = {lex.random_word(record_rng(1, k), weighted=True)
             for k in range(30)}
    assert drawn == {"always"}
    uniform = {lex.random_word(record_rng(1, k)) for k in range(30)}
    assert uniform == {"never", "always"}


def test_lexicon_from_files(tmp_path):
    vocab = tmp_path / "vocab.txt"
    vocab.write_text("pes\t5\nkocka\n\nmys\t1.5\n", encoding="utf-8")
    props = tmp_path / "props.txt"
    props.write_text("mama\ttata\tteta\n\n", encoding="utf-8")
    lex = ConfusionLexicon.from_files(vocab, props)
    assert lex.words == ("pes", "kocka", "mys")
    assert lex.frequencies == (5.0, 1.0, 1.5)
    assert lex.proposals == {"mama": ("tata", "teta")}


def test_lexicon_from_files_errors(tmp_path):
    bad = tmp_path / "vocab.txt"
    bad.write_text("pes\tmany\n", encoding="utf-8")
    with pytest.raises(ParseError, match="bad frequency"):
        ConfusionLexicon.from_files(bad)
    bad.write_text("pes\t1\t2\n", encoding="utf-8")
    with pytest.raises(ParseError, match="vocab.txt:1"):
        ConfusionLexicon.from_files(bad)


def test_lexicon_pickle_round_trip():
    lex = ConfusionLexicon(vocabulary=[("kap", 2.0)],
                           proposals={"kat": ("cat",)})
    lex.candidates("kit")
    clone = pickle.loads(pickle.dumps(lex))
    assert clone.words == lex.words
    assert clone.proposals == lex.proposals
    assert clone.candidates("kit") == lex.candidates("kit")


def test_corrupt_word_substitute():
    lex = ConfusionLexicon(proposals={"kat": ("cat", "bat")})
    tokens = ["kat", "pes"]
    op = corrupt_word(record_rng(0, 0), tokens, 0, word_profile("substitute"),
                      lex)
    assert op == "substitute"
    assert tokens[0] in ("cat", "bat") and tokens[1] == "pes"


def test_corrupt_word_substitute_without_candidates():
    tokens = ["kat"]
    op = corrupt_word(record_rng(0, 0), tokens, 0, word_profile("substitute"),
                      None)
    assert op is None
    assert tokens == ["kat"]


def test_corrupt_word_insert():
    lex = ConfusionLexicon(vocabulary=["pes"])
    tokens = ["a", "b"]
    op = corrupt_word(record_rng(0, 0), tokens, 0, word_profile("insert"), lex)
    assert op == "insert"
    assert tokens == ["a", "pes", "b"]


def test_corrupt_word_weighted_insert():
    lex = ConfusionLexicon(vocabulary=[("never", 0.0), ("always", 1.0)])
    tokens = ["a"]
    op = corrupt_word(record_rng(0, 0), tokens, 0, word_profile("insert"),
                      lex, weighted_insert=True)
    assert op == "insert"
    assert tokens == ["a", "always"]


def test_corrupt_word_delete():
    tokens = ["a", "b"]
    assert corrupt_word(record_rng(0, 0), tokens, 0,
                        word_profile("delete")) == "delete"
    assert tokens == ["b"]


def test_corrupt_word_swap():
    tokens = ["a", "b"]
    assert corrupt_word(record_rng(0, 0), tokens, 0,
                        word_profile("swap")) == "swap"
    assert tokens == ["b", "a"]


def test_corrupt_word_swap_needs_right_neighbor():
    tokens = ["only"]
    assert corrupt_word(record_rng(0, 0), tokens, 0,
                        word_profile("swap")) is None
    assert tokens == ["only"]


def test_corrupt_word_recase_branches():
    # record 0 draws the whole-lowercase branch, record 1 the case-flip mask
    tokens = ["Praha"]
    assert corrupt_word(record_rng(0, 0), tokens, 0,
                        word_profile("recase")) == "recase"
    assert tokens == ["praha"]
    tokens = ["Praha"]
    assert corrupt_word(record_rng(0, 1), tokens, 0,
                        word_profile("recase")) == "recase"
    assert tokens[0] != "Praha" and tokens[0].lower() == "praha"


def test_corrupt_word_recase_caseless():
    tokens = ["1234"]
    op = corrupt_word(record_rng(0, 0), tokens, 0, word_profile("recase"))
    assert tokens == ["1234"]
    assert op in ("recase", None)


def test_corrupt_chars_substitute_everywhere():
    tokens = ["abc", "de"]
    applied = corrupt_chars(record_rng(0, 0), tokens,
                            char_profile("substitute"))
    assert applied == ["substitute"] * 5
    assert [len(t) for t in tokens] == [3, 2]
    for new, old in zip(tokens, ("abc", "de")):
        assert all(n != o for n, o in zip(new, old))


def test_corrupt_chars_toggle_diacritics():
    profile = char_profile("toggle_diacritics")
    tokens = ["š"]
    corrupt_chars(record_rng(0, 0), tokens, profile)
    assert tokens == ["s"]
    tokens = ["s"]
    corrupt_chars(record_rng(0, 0), tokens, profile)
    assert tokens == ["š"]
    # chars without variants (k, l) are left alone
    tokens = ["škola"]
    applied = corrupt_chars(record_rng(0, 0), tokens, profile)
    assert tokens == ["skólá"]
    assert applied == ["toggle_diacritics"] * 3


def test_corrupt_chars_recase():
    tokens = ["aB"]
    corrupt_chars(record_rng(0, 0), tokens, char_profile("recase"))
    assert tokens == ["Ab"]


def test_corrupt_chars_insert():
    tokens = ["xy"]
    corrupt_chars(record_rng(0, 0), tokens, char_profile("insert"))
    assert len(tokens) == 1 and len(tokens[0]) == 4
    assert tokens[0][0] == "x" and "y" in tokens[0][2:]


def test_corrupt_chars_delete_drops_emptied_tokens():
    tokens = ["a", "bc"]
    applied = corrupt_chars(record_rng(0, 0), tokens, char_profile("delete"))
    assert tokens == []
    assert applied == ["delete"] * 3


def test_corrupt_chars_zero_probability_identity():
    tokens = ["abc", "de"]
    assert corrupt_chars(record_rng(0, 0), tokens,
                         char_profile("substitute", mean=0.0)) == []
    assert tokens == ["abc", "de"]
    assert corrupt_chars(record_rng(0, 0), [], char_profile("substitute")) == []


def test_english_profile_never_toggles():
    profile = profile_from_dict({"lang": "en",
                                 "char_err": {"mean": 1.0, "std": 0.0}})
    for k in range(50):
        tokens = ["several", "Words", "here"]
        applied = corrupt_chars(record_rng(2, k), tokens, profile)
        assert "toggle_diacritics" not in applied
        assert all(ord(c) < 128 for t in tokens for c in t)


def test_czech_profile_produces_diacritics():
    profile = profile_from_dict({"lang": "cs",
                                 "char_err": {"mean": 0.5, "std": 0.0}})
    outputs = []
    for k in range(5):
        tokens = ["skola", "ryzost", "cesta"]
        corrupt_chars(record_rng(3, k), tokens, profile)
        outputs.extend(tokens)
    assert any(ord(c) > 127 for t in outputs for c in t)


def test_corrupt_sentence_identity_with_zero_means():
    config = NoiseConfig(profile=quiet_profile())
    s = Sentence.from_text("vůbec nic se nestane")
    assert corrupt_sentence(s, config, None, 0) == s
    empty = Sentence(())
    assert corrupt_sentence(empty, config, None, 0) == empty


def test_corrupt_sentence_deterministic_per_index():
    lex = ConfusionLexicon(vocabulary=["pes", "kocka"],
                           proposals={"mama": ("tata",), "doma": ("dole",)})
    config = NoiseConfig(profile=builtin_profile("cs"), seed=7)
    s = Sentence.from_text("mama je doma")
    first = corrupt_sentence(s, config, lex, 0)
    assert corrupt_sentence(s, config, lex, 0) == first
    assert corrupt_sentence(s, config, lex, 1) != first


def test_char_pass_gating():
    lex = ConfusionLexicon(proposals={"ab": ("xy",), "cd": ("qr",)})
    sub_words = word_profile("substitute",
                             word_err={"mean": 1.0, "std": 0.0},
                             char_ops={"substitute": 1.0, "insert": 0.0,
                                       "delete": 0.0, "recase": 0.0,
                                       "toggle_diacritics": 0.0},
                             char_err={"mean": 1.0, "std": 0.0})
    s = Sentence.from_text("ab cd")
    # word pass corrupted something, so the char pass runs even when
    # restricted to corrupted sentences
    out = corrupt_sentence(s, NoiseConfig(profile=sub_words,
                                          char_noise_all=False), lex, 0)
    assert out.tokens != ("xy", "qr") and out != s
    restricted = profile_from_dict({"lang": "cs",
                                    "word_err": {"mean": 0.0, "std": 0.0},
                                    "char_err": {"mean": 1.0, "std": 0.0}})
    config = NoiseConfig(profile=restricted, char_noise_all=False)
    assert corrupt_sentence(s, config, None, 0) == s
    config = NoiseConfig(profile=restricted, char_noise_all=True)
    assert corrupt_sentence(s, config, None, 0) != s


def test_noise_config_validation():
    profile = quiet_profile()
    with pytest.raises(ValidationError, match="max_sentences"):
        NoiseConfig(profile=profile, max_sentences=0)
    with pytest.raises(ValidationError, match="emit_order"):
        NoiseConfig(profile=profile, emit_order="sideways")
    with pytest.raises(ValidationError, match="seed"):
        NoiseConfig(profile=profile, seed=-1)
    with pytest.raises(ValidationError, match="seed"):
        NoiseConfig(profile=profile, seed=2 ** 64)


def test_synthesize_caps_output():
    config = NoiseConfig(profile=quiet_profile(), max_sentences=2)
    pairs = list(synthesize_corpus(["a", "b", "c"], config))
    assert pairs == [("a", "a"), ("b", "b")]


def test_synthesize_rerun_is_identical():
    lex = ConfusionLexicon(vocabulary=["pes"],
                           proposals={"mama": ("tata",)})
    config = NoiseConfig(profile=builtin_profile("cs"), seed=11)
    lines = ["mama je doma", "pes je tady"] * 20
    first = list(synthesize_corpus(lines, config, lex))
    assert list(synthesize_corpus(lines, config, lex)) == first


def test_synthesize_tokenizes_raw_input():
    config = NoiseConfig(profile=quiet_profile())
    assert list(synthesize_corpus(["Hi, there"], config)) == \
        [("Hi , there", "Hi , there")]
    config = NoiseConfig(profile=quiet_profile(), pretokenized=True)
    assert list(synthesize_corpus(["Hi, there"], config)) == \
        [("Hi, there", "Hi, there")]


def test_synthesize_sharding_matches_full_run():
    lex = ConfusionLexicon(vocabulary=["pes"],
                           proposals={"mama": ("tata",)})
    config = NoiseConfig(profile=builtin_profile("cs"), seed=13)
    lines = [f"mama veta {i} je doma" for i in range(10)]
    full = list(synthesize_corpus(lines, config, lex))
    head = list(synthesize_corpus(lines[:5], config, lex))
    tail = list(synthesize_corpus(lines[5:], config, lex, start_index=5))
    assert head + tail == full


def test_synthesize_insert_weight_requires_vocabulary():
    config = NoiseConfig(profile=builtin_profile("cs"))
    with pytest.raises(ValidationError, match="insert weight"):
        list(synthesize_corpus(["mama je doma"], config, None))
    empty = ConfusionLexicon(proposals={"a": ("b",)})
    with pytest.raises(ValidationError, match="insert weight"):
        list(synthesize_corpus(["mama je doma"], config, empty))
    list(synthesize_corpus(["mama je doma"], config,
                           ConfusionLexicon(vocabulary=["pes"])))


def test_synthesize_skips_rare_bad_utf8(caplog):
    config = NoiseConfig(profile=quiet_profile())
    lines = [b"line %d" % i for i in range(200)]
    lines[50] = b"\xff\xfe broken"
    with caplog.at_level(logging.WARNING, logger="geckit.noise"):
        pairs = list(synthesize_corpus(lines, config))
    assert len(pairs) == 199
    assert "skipping undecodable input line 51" in caplog.text


def test_synthesize_aborts_on_many_bad_lines():
    config = NoiseConfig(profile=quiet_profile())
    few = [b"ok"] * 8 + [b"\xff", b"\xff"]
    with pytest.raises(ValidationError, match="2 of 10 input"):
        list(synthesize_corpus(few, config))
    # aborts at the second late bad line without reading the rest
    many = [b"ok"] * 120 + [b"\xff", b"\xff"] + [b"ok"] * 100
    with pytest.raises(ValidationError, match="2 of 122 input"):
        list(synthesize_corpus(many, config))


def test_parallel_output_matches_sequential():
    lex = ConfusionLexicon(vocabulary=["pes", "kocka"],
                           proposals={"mama": ("tata",), "doma": ("dole",)})
    config = NoiseConfig(profile=builtin_profile("cs"), seed=21)
    lines = [f"mama cislo {i} je doma" for i in range(500)]
    sequential = list(synthesize_corpus_parallel(lines, config, lex,
                                                 threads=1))
    parallel = list(synthesize_corpus_parallel(lines, config, lex,
                                               threads=2, chunk_size=64))
    assert parallel == sequential


def test_word_corruption_rate_matches_clipped_mean():
    # All-feasible substitution-only profile: the modified-token fraction
    # is exactly the sampled count, which must average the clipped mean.
    vocab = [f"w{i:03d}" for i in range(20)]
    lex = ConfusionLexicon(proposals={w: (w.upper(),) for w in vocab})
    profile = word_profile("substitute",
                           word_err={"mean": 0.15, "std": 0.2})
    config = NoiseConfig(profile=profile, seed=3)
    rnd = random.Random(17)
    changed = total = 0
    for index in range(8000):
        clean = Sentence.of(rnd.sample(vocab, 10))
        noisy = corrupt_sentence(clean, config, lex, index)
        changed += sum(n != c for n, c in zip(noisy.tokens, clean.tokens))
        total += len(clean)
    assert changed / total == pytest.approx(CLIPPED_WORD_MEAN, abs=0.01)


LETTERS = "acdeinorstuyz"     # every letter has a Czech diacritic variant


def distinct_words(rnd, count, taken):
    words = []
    while len(words) < count:
        word = "".join(rnd.choice(LETTERS) for _ in range(6))
        if word not in taken:
            taken.add(word)
            words.append(word)
    return words


def simulate_corruption(rnd, profile):
    """Re-simulate one 8-token sentence with independent randomness.

    Tracks only what alignment can see: per surviving token its clean
    position (None for new material), its length, and whether its text
    changed.  Every operation is feasible in the generated corpus except
    swapping the last token, which mirrors the bounded redraw.
    """
    tok_names = list(profile.token_ops)
    tok_weights = list(profile.token_ops.values())
    char_names = list(profile.char_ops)
    char_weights = list(profile.char_ops.values())
    entries = [[i, 6, False] for i in range(8)]
    p = min(1.0, max(0.0, rnd.gauss(profile.word_err.mean,
                                    profile.word_err.std)))
    count = min(int(p * 8 + 0.5), 8)
    for index in sorted(rnd.sample(range(8), count), reverse=True):
        if index >= len(entries):
            continue
        for _ in range(10):
            op = rnd.choices(tok_names, weights=tok_weights)[0]
            if op == "substitute":
                entries[index] = [None, 6, True]
            elif op == "insert":
                entries.insert(index + 1, [None, 6, True])
            elif op == "delete":
                del entries[index]
            elif op == "swap":
                if index + 1 >= len(entries):
                    continue
                entries[index], entries[index + 1] = \
                    entries[index + 1], entries[index]
            elif rnd.random() >= 0.5:
                entries[index][2] = True
            break
    total = sum(e[1] for e in entries)
    if total:
        p = min(1.0, max(0.0, rnd.gauss(profile.char_err.mean,
                                        profile.char_err.std)))
        count = min(int(p * total + 0.5), total)
        if count:
            starts, offset = [], 0
            for e in entries:
                starts.append(offset)
                offset += e[1]
            for flat in sorted(rnd.sample(range(total), count), reverse=True):
                lo, hi = 0, len(starts) - 1
                while lo < hi:
                    mid = (lo + hi + 1) // 2
                    if starts[mid] <= flat:
                        lo = mid
                    else:
                        hi = mid - 1
                entry = entries[lo]
                op = rnd.choices(char_names, weights=char_weights)[0]
                if op == "insert":
                    entry[1] += 1
                elif op == "delete":
                    entry[1] -= 1
                    if entry[1] == 0:
                        del entries[lo]
                        continue
                entry[2] = True
    return entries


def test_corpus_error_rate_matches_independent_simulation():
    rnd = random.Random(99)
    taken = set()
    sentence_words = distinct_words(rnd, 400, taken)
    insert_words = distinct_words(rnd, 300, taken)
    proposal_words = distinct_words(rnd, 1200, taken)
    proposals = {w: tuple(proposal_words[3 * i:3 * i + 3])
                 for i, w in enumerate(sentence_words)}
    lines = [" ".join(rnd.sample(sentence_words, 8)) for _ in range(20000)]

    profile = builtin_profile("cs")
    config = NoiseConfig(profile=profile, seed=424242, pretokenized=True)
    lexicon = ConfusionLexicon(vocabulary=insert_words, proposals=proposals)
    pairs = [(Sentence.from_text(noisy), Sentence.from_text(clean))
             for noisy, clean in synthesize_corpus(lines, config, lexicon)]
    real_rate = corpus_error_rate(pairs)

    sim = random.Random(31337)
    fresh = 0
    nonmatch = edges = 0
    clean_side = tuple(("t", i) for i in range(8))
    for _ in range(20000):
        noisy_side = []
        for pos, _, text_changed in simulate_corruption(sim, profile):
            if text_changed or pos is None:
                fresh += 1
                noisy_side.append(("f", fresh))
            else:
                noisy_side.append(("t", pos))
        cost, count = cost_and_edges_oracle(tuple(noisy_side), clean_side)
        nonmatch += cost
        edges += count
    assert real_rate == pytest.approx(nonmatch / edges, abs=0.01)
