#!/usr/bin/env python3
# Copyright (C) 2026 The offlang Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes character-level graphemic statistics for random strings.

Each output line is: code points (hex, space separated), a tab, then
chars upper upper_ratio special punct exclaim question digits elongated.
Strings contain no '@', so mention stripping is the identity.
"""

import random
import sys
import unicodedata

WHITE_SPACE = {
    0x09, 0x0A, 0x0B, 0x0C, 0x0D, 0x20, 0x85, 0xA0, 0x1680, 0x2000, 0x2001,
    0x2002, 0x2003, 0x2004, 0x2005, 0x2006, 0x2007, 0x2008, 0x2009, 0x200A,
    0x2028, 0x2029, 0x202F, 0x205F, 0x3000,
}

# Blocks whose assignments and categories did not change between
# Unicode 13 and 14.
RANGES = [
    (0x21, 0x7E), (0xA1, 0x17F), (0x370, 0x3FF), (0x400, 0x4FF),
    (0x5D0, 0x5EA), (0x660, 0x669), (0x966, 0x96F), (0x2010, 0x2027),
    (0x2030, 0x205E), (0x20A0, 0x20BF), (0x2190, 0x21FF), (0x3001, 0x3011),
    (0x3041, 0x3096), (0x4E00, 0x4EFF), (0xFF01, 0xFF5E), (0x1F600, 0x1F64F),
]


def pick(rng):
    r = rng.random()
    if r < 0.12:
        return chr(rng.choice(sorted(WHITE_SPACE)))
    if r < 0.25:
        return rng.choice("!?!.aaAA")
    lo, hi = rng.choice(RANGES)
    while True:
        c = chr(rng.randint(lo, hi))
        if c != "@" and unicodedata.category(c) != "Cn":
            return c


def stats(s):
    letters = upper = special = punct = digits = 0
    for c in s:
        cat = unicodedata.category(c)
        is_letter = cat.startswith("L")
        is_digit = cat == "Nd"
        letters += is_letter
        upper += cat == "Lu"
        digits += is_digit
        punct += cat.startswith("P")
        special += not is_letter and not is_digit and ord(c) not in WHITE_SPACE
    elongated = any(s[i] == s[i + 1] == s[i + 2] for i in range(len(s) - 2))
    ratio = upper / letters if letters else 0.0
    return [len(s), upper, ratio, special, punct, s.count("!"), s.count("?"),
            digits, int(elongated)]


def main():
    rng = random.Random(20261016)
    out = sys.stdout
    for _ in range(1000):
        s = "".join(pick(rng) for _ in range(rng.randint(0, 24)))
        cps = " ".join("%x" % ord(c) for c in s)
        out.write(cps + "\t" + " ".join(repr(float(v)) for v in stats(s)) + "\n")


if __name__ == "__main__":
    main()
