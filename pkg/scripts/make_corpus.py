#!/usr/bin/env python3
"""Generate the bundled desk-scale corpus and gold morpheme lexicon.

Produces deterministic synthetic English-like text with real morphological
structure (stems, prefixes, suffixes, compounds) so the full pipeline,
including morpheme recovery, has signal to find at desk scale:

    data/train.txt     16,000 sentences (tokenizer training)
    data/indomain.txt   2,000 sentences (same generator, held-out seed)
    data/ood.txt        2,000 sentences (different register: informal style,
                        shifted stem inventory, contractions, louder punctuation)
    data/lexicon.txt    gold morpheme list: free stems, "-suffix" bound forms,
                        "prefix-" bound forms, plus entries no generator uses
                        (keeps coverage honestly below 100%)

Everything is driven by fixed seeds; reruns are byte-identical.

Usage: python scripts/make_corpus.py [--out-dir data]
"""

import argparse
import random
from pathlib import Path

STEMS_CORE = """
act add age agree aim air answer appear area arm art ask attack attempt
back balance ball band bank base battle bear beat bed begin believe bell
belong bend bill bird birth bite blame blind block blood blow board boat
body boil bone book border bottle bottom bow box branch brave bread break
breath bridge bright bring broad brother brush build burn burst business
buy call calm camp card care carry case cast catch cause cell chain chair
chance change charge charm chart cheap check cheer chest chief child
choice circle claim class clean clear climb clock close cloth cloud coal
coast coat cold collect color comfort command common company compare
connect consider contain control cook cool copy corn corner correct cost
count country course court cover crack craft crash cream crime cross
crowd crown cry cup current curve cut damage dance danger dark date day
deal dear debt decide deep defend degree deliver demand depend desert
design desk detail develop die direct dirt distant divide doctor dog door
doubt draw dream dress drink drive drop dry dust duty earn earth east
edge effect effort egg elect employ empty end enjoy enter equal escape
event exact examine example except exist expect explain express extend
face fact fail fair faith fall famous fancy farm fast fat fault favor
fear feed feel fence field fight figure fill film find fine finger finish
fire firm fish fit fix flag flash flat floor flow flower fold follow
food foot force forget form fortune forward frame free fresh friend
front fruit gain game garden gate gather general gentle gift glad glass
gold govern grand grant grass great green ground group grow guard guess
guest guide gun habit hand hang happen harbor hard harm haste hat head
heal health hear heart heat heavy help hide high hill hit hold hole
hollow home hope horn horse hot hour house human hunt hurry hurt ice
idea inch iron island join joint journey joy judge jump just keep key
kick kill kind king land large last late laugh law lead leaf learn
leave left lend length level lie life lift light like limit line lip
list listen live load local lock long look lord lose loss loud love low
machine mail main major make man manage map march mark market mass
master match material matter meal mean measure meat meet member mention
metal middle might mile milk mill mind mine minute miss mix model
moment month moon more morning most mother motion mount mountain mouth
move much music name narrow nation nature near neck need nerve nest
net new news night noble noise north note notice number object observe
occasion offer office oil old open operate order organ other own pack
page pain paint pair paper part pass past path pay peace people perform
period person pick picture piece place plain plan plant play please
plenty point pool poor port position possess post pound pour power
practice praise present press price print prison prize produce profit
promise proof proper protect prove provide public pull punish pure push
quarter question quick quiet race rain raise range rank rate reach read
ready reason receive record red refuse regard region regular relate
remain remark remember remove rent repeat report represent request
respect rest result return reward rich ride right ring rise risk river
road rock roll roof room root rough round row rub rule run rush safe
sail salt same sand save scale school score sea search season seat
second secret see seed seem select self sell send sense serve set
settle shade shake shape share sharp shelter shine ship shock shoot
shop short shout show side sign silver simple sing single sink sister
sit size skill skin sky sleep slip slow small smell smile smoke smooth
snow soft soil soldier solid son sort sound south space speak special
speed spell spend spirit spot spread spring square stage stamp stand
star start state station stay steam steel step stick stiff still stock
stone stop store storm story straight strange stream street stretch
strike strong structure struggle study subject succeed such sudden
suffer sugar suit summer supply support suppose sure surface surprise
sweet swim system table tail take talk taste teach team tear tell term
test thank theory thick thin thing think thought thunder ticket tie
time tin tire title today tone tongue tooth top total touch town track
trade train travel treat tree trick trip trouble trust try turn twist
under unit use usual valley value view visit voice vote wage wait walk
wall wander want war warm warn wash waste watch water wave way weak
wealth wear weather week weigh welcome west wet wheel while whisper
white whole wide will win wind window winter wire wise wish wonder wood
word work world worry worth wound wrap write wrong yard year yellow
yield young
""".split()

STEMS_WIKI = """
abbey archive assembly astronomer atlas author ballot basin bishop
canal capital cathedral census century chapel charter citizen climate
colony composer congress council county democracy dialect district
dynasty economy emperor empire engineer episode estate exhibit
expedition federal festival fleet fortress founder frontier gallery
garrison geology glacier harvest heritage historian infantry institute
invasion kingdom lagoon latitude legend library mayor medal merchant
meridian monastery monument museum novelist orbit orchestra parish
parliament peninsula physicist pioneer poet premier province publish
railway rebellion reform regiment register reign republic reservoir
revolt scholar senate settlement statue summit temple territory theater
treaty tribune tribute university uprising vessel village volcano
voyage
""".split()

STEMS_FORUM = """
account avatar ban blog board bonus boost bot buddy career cash
click clip combo comment crew deck download drama dude feed filter
flame fluke forum fun geek glitch grind guild hype inbox karma lag
league link lobby loot lurk meme merch mod movie newbie noob patch
ping pixel podcast poll popcorn profile quest queue rage rando
rant reply repost rig roast salty screen scroll server share
shoutout skin slang snack spam spoiler squad stan stream sub
thread tier troll tweet upload upvote vibe vlog weekend wifi
""".split()

FUNCTION_WORDS = """
the a an and or but of to in on at by for with from as is was are were
be been it its this that these those he she they we you i his her their
our your not no nor so if then than when while where which who whom
into over under between about after before during against through
""".split()

PROPER_NAMES = """
Alder Bexley Calder Darrow Elveden Farrow Garnet Halden Irwell Jarrow
Keld Lorring Marden Norwood Orley Penrith Quill Rushton Selby Tarlton
Unsworth Varden Welford Yarrow Ashdown Birchall Coleford Dunmore
Eastray Foxlow
""".split()

SUFFIXES = [
    ("s", 26), ("ed", 18), ("ing", 18), ("er", 10), ("ly", 8),
    ("ness", 4), ("ment", 4), ("tion", 3), ("able", 3), ("ful", 3),
    ("less", 3), ("est", 3), ("ity", 2), ("ous", 2), ("ish", 2),
    ("al", 2), ("ive", 2),
]

PREFIXES = [
    ("un", 8), ("re", 8), ("pre", 4), ("co", 4), ("de", 3),
    ("over", 3), ("mis", 2), ("non", 2), ("out", 2), ("under", 2),
]

# Morphemes that belong in the gold lexicon but that the generator never
# emits: real models never see the whole lexicon either.
UNUSED_MORPHEMES = """
anchor bargain beacon blossom burrow cellar chisel clover copper
cradle crystal ember fathom feather fiddle flint furrow gossip
hammock harness hazel ivory kettle lantern marble meadow nectar
orchard parcel pebble quarry raven saddle shovel sparrow thimble
timber walnut willow
""".split()

UNUSED_BOUND = ["ward", "wise", "dom", "hood", "ship", "archy", "cracy", "phobia"]

CONTRACTIONS = [
    "don't", "can't", "it's", "i'm", "that's", "won't", "didn't",
    "you're", "isn't", "we're", "let's", "couldn't",
]

INTERJECTIONS = ["yeah", "nah", "wow", "ugh", "lol", "hmm", "ok", "welp"]


def _clean_stems(words):
    return sorted({w for w in words if w.isascii() and w.isalpha()})


def zipf_weights(n, alpha=1.07, shift=2.7):
    return [1.0 / (i + shift) ** alpha for i in range(n)]


class SentenceSource:
    """One register of text: a stem inventory plus style knobs."""

    def __init__(self, stems, rng, *, informal=False):
        self.rng = rng
        self.stems = stems
        self.weights = zipf_weights(len(stems))
        self.informal = informal
        self.suffixes = [s for s, w in SUFFIXES for _ in range(w)]
        self.prefixes = [p for p, w in PREFIXES for _ in range(w)]

    def content_word(self):
        rng = self.rng
        stem = rng.choices(self.stems, weights=self.weights, k=1)[0]
        r = rng.random()
        if r < 0.05:
            other = rng.choices(self.stems, weights=self.weights, k=1)[0]
            if other != stem:
                return stem + other
        word = stem
        if rng.random() < 0.10:
            word = rng.choice(self.prefixes) + word
        if rng.random() < 0.38:
            word = word + rng.choice(self.suffixes)
            if rng.random() < 0.05:
                word = word + rng.choice(self.suffixes)
        return word

    def token(self):
        rng = self.rng
        r = rng.random()
        if r < 0.42:
            return rng.choice(FUNCTION_WORDS)
        if r < 0.46:
            return rng.choice(PROPER_NAMES)
        if r < 0.48:
            if rng.random() < 0.5:
                return str(rng.randint(1801, 2014))
            return str(rng.randint(2, 99))
        if self.informal and r < 0.56:
            if rng.random() < 0.5:
                return rng.choice(CONTRACTIONS)
            return rng.choice(INTERJECTIONS)
        return self.content_word()

    def sentence(self):
        rng = self.rng
        n = max(3, min(26, round(rng.gauss(11, 4))))
        words = [self.token() for _ in range(n)]
        words[0] = words[0][0].upper() + words[0][1:]
        # attach commas to a few non-final words, as raw text does
        for i in range(len(words) - 1):
            if rng.random() < 0.06:
                words[i] = words[i] + ","
        if rng.random() < (0.10 if self.informal else 0.03):
            i = rng.randrange(len(words))
            words[i] = '"' + words[i] + '"'
        if rng.random() < 0.02:
            i = rng.randrange(len(words))
            words[i] = "(" + words[i] + ")"
        if self.informal:
            final = rng.choices([".", "!", "?", "..."], weights=[55, 20, 18, 7], k=1)[0]
        else:
            final = rng.choices([".", "?", "!"], weights=[88, 7, 5], k=1)[0]
        words[-1] = words[-1] + final
        return " ".join(words)


def write_split(path, source, n_sentences):
    lines = [source.sentence() for _ in range(n_sentences)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return lines


def write_lexicon(path):
    entries = []
    for stem in _clean_stems(STEMS_CORE + STEMS_WIKI + STEMS_FORUM + UNUSED_MORPHEMES):
        entries.append(stem)
    for suf, _ in SUFFIXES:
        entries.append("-" + suf)
    for suf in UNUSED_BOUND:
        entries.append("-" + suf)
    for pre, _ in PREFIXES:
        entries.append(pre + "-")
    path.write_text("\n".join(sorted(set(entries))) + "\n", encoding="utf-8")
    return entries


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data", type=Path)
    args = parser.parse_args()
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)

    wiki_stems = _clean_stems(STEMS_CORE + STEMS_WIKI)
    forum_stems = _clean_stems(STEMS_CORE[::2] + STEMS_FORUM)

    train = SentenceSource(wiki_stems, random.Random(20240801), informal=False)
    indomain = SentenceSource(wiki_stems, random.Random(20240802), informal=False)
    ood = SentenceSource(forum_stems, random.Random(20240803), informal=True)

    write_split(out / "train.txt", train, 16000)
    write_split(out / "indomain.txt", indomain, 2000)
    write_split(out / "ood.txt", ood, 2000)
    lex = write_lexicon(out / "lexicon.txt")
    print(f"wrote corpus splits and {len(set(lex))} lexicon entries to {out}/")


if __name__ == "__main__":
    main()
