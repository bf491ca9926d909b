//! Simple-font encodings and glyph-name lookup.

/// ASCII glyph names for codes 32..=126 in standard order.
const ASCII_NAMES: [&str; 95] = [
    "space",
    "exclam",
    "quotedbl",
    "numbersign",
    "dollar",
    "percent",
    "ampersand",
    "quotesingle",
    "parenleft",
    "parenright",
    "asterisk",
    "plus",
    "comma",
    "hyphen",
    "period",
    "slash",
    "zero",
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "colon",
    "semicolon",
    "less",
    "equal",
    "greater",
    "question",
    "at",
    "A",
    "B",
    "C",
    "D",
    "E",
    "F",
    "G",
    "H",
    "I",
    "J",
    "K",
    "L",
    "M",
    "N",
    "O",
    "P",
    "Q",
    "R",
    "S",
    "T",
    "U",
    "V",
    "W",
    "X",
    "Y",
    "Z",
    "bracketleft",
    "backslash",
    "bracketright",
    "asciicircum",
    "underscore",
    "grave",
    "a",
    "b",
    "c",
    "d",
    "e",
    "f",
    "g",
    "h",
    "i",
    "j",
    "k",
    "l",
    "m",
    "n",
    "o",
    "p",
    "q",
    "r",
    "s",
    "t",
    "u",
    "v",
    "w",
    "x",
    "y",
    "z",
    "braceleft",
    "bar",
    "braceright",
    "asciitilde",
];

/// Glyph names for U+00A0..=U+00FF.
const LATIN1_NAMES: [&str; 96] = [
    "nbspace",
    "exclamdown",
    "cent",
    "sterling",
    "currency",
    "yen",
    "brokenbar",
    "section",
    "dieresis",
    "copyright",
    "ordfeminine",
    "guillemotleft",
    "logicalnot",
    "sfthyphen",
    "registered",
    "macron",
    "degree",
    "plusminus",
    "twosuperior",
    "threesuperior",
    "acute",
    "mu",
    "paragraph",
    "periodcentered",
    "cedilla",
    "onesuperior",
    "ordmasculine",
    "guillemotright",
    "onequarter",
    "onehalf",
    "threequarters",
    "questiondown",
    "Agrave",
    "Aacute",
    "Acircumflex",
    "Atilde",
    "Adieresis",
    "Aring",
    "AE",
    "Ccedilla",
    "Egrave",
    "Eacute",
    "Ecircumflex",
    "Edieresis",
    "Igrave",
    "Iacute",
    "Icircumflex",
    "Idieresis",
    "Eth",
    "Ntilde",
    "Ograve",
    "Oacute",
    "Ocircumflex",
    "Otilde",
    "Odieresis",
    "multiply",
    "Oslash",
    "Ugrave",
    "Uacute",
    "Ucircumflex",
    "Udieresis",
    "Yacute",
    "Thorn",
    "germandbls",
    "agrave",
    "aacute",
    "acircumflex",
    "atilde",
    "adieresis",
    "aring",
    "ae",
    "ccedilla",
    "egrave",
    "eacute",
    "ecircumflex",
    "edieresis",
    "igrave",
    "iacute",
    "icircumflex",
    "idieresis",
    "eth",
    "ntilde",
    "ograve",
    "oacute",
    "ocircumflex",
    "otilde",
    "odieresis",
    "divide",
    "oslash",
    "ugrave",
    "uacute",
    "ucircumflex",
    "udieresis",
    "yacute",
    "thorn",
    "ydieresis",
];

const OTHER_NAMES: &[(&str, char)] = &[
    ("quoteleft", '\u{2018}'),
    ("quoteright", '\u{2019}'),
    ("quotesinglbase", '\u{201A}'),
    ("quotedblleft", '\u{201C}'),
    ("quotedblright", '\u{201D}'),
    ("quotedblbase", '\u{201E}'),
    ("guilsinglleft", '\u{2039}'),
    ("guilsinglright", '\u{203A}'),
    ("ellipsis", '\u{2026}'),
    ("dagger", '\u{2020}'),
    ("daggerdbl", '\u{2021}'),
    ("bullet", '\u{2022}'),
    ("endash", '\u{2013}'),
    ("emdash", '\u{2014}'),
    ("perthousand", '\u{2030}'),
    ("trademark", '\u{2122}'),
    ("Euro", '\u{20AC}'),
    ("florin", '\u{0192}'),
    ("fraction", '\u{2044}'),
    ("circumflex", '\u{02C6}'),
    ("tilde", '\u{02DC}'),
    ("Scaron", '\u{0160}'),
    ("scaron", '\u{0161}'),
    ("Zcaron", '\u{017D}'),
    ("zcaron", '\u{017E}'),
    ("OE", '\u{0152}'),
    ("oe", '\u{0153}'),
    ("Ydieresis", '\u{0178}'),
    ("Lslash", '\u{0141}'),
    ("lslash", '\u{0142}'),
    ("dotlessi", '\u{0131}'),
    ("fi", '\u{FB01}'),
    ("fl", '\u{FB02}'),
    ("minus", '\u{2212}'),
    ("hyphen", '-'),
    ("space", ' '),
];

/// Unicode text for a glyph name: the tables above, then the `uniXXXX` and
/// `uXXXX` conventions.
pub fn glyph_to_unicode(name: &str) -> Option<String> {
    if let Some(i) = ASCII_NAMES.iter().position(|&n| n == name) {
        return Some(char::from(32 + i as u8).to_string());
    }
    if let Some(i) = LATIN1_NAMES.iter().position(|&n| n == name) {
        return char::from_u32(0xA0 + i as u32).map(String::from);
    }
    if let Some(&(_, c)) = OTHER_NAMES.iter().find(|(n, _)| *n == name) {
        return Some(c.to_string());
    }
    let base = name.split('.').next().unwrap_or(name);
    if base != name {
        return glyph_to_unicode(base);
    }
    if let Some(hex) = name.strip_prefix("uni") {
        if hex.len() >= 4 && hex.len() % 4 == 0 {
            let units: Option<Vec<u16>> =
                hex.as_bytes().chunks(4).map(|c| u16::from_str_radix(std::str::from_utf8(c).ok()?, 16).ok()).collect();
            return String::from_utf16(&units?).ok();
        }
    }
    if let Some(hex) = name.strip_prefix('u') {
        if (4..=6).contains(&hex.len()) {
            return u32::from_str_radix(hex, 16).ok().and_then(char::from_u32).map(String::from);
        }
    }
    None
}

pub type CodeTable = [Option<char>; 256];

fn ascii_base() -> CodeTable {
    let mut t = [None; 256];
    for c in 32u8..=126 {
        t[c as usize] = Some(c as char);
    }
    t
}

pub fn win_ansi() -> CodeTable {
    let mut t = ascii_base();
    const HIGH: [u32; 32] = [
        0x20AC, 0, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0, 0x017D,
        0, 0, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,
        0x017E, 0x0178,
    ];
    for (i, &u) in HIGH.iter().enumerate() {
        if u != 0 {
            t[0x80 + i] = char::from_u32(u);
        }
    }
    for (c, slot) in t.iter_mut().enumerate().skip(0xA0) {
        *slot = char::from_u32(c as u32);
    }
    t
}

pub fn mac_roman() -> CodeTable {
    let mut t = ascii_base();
    const HIGH: [u32; 128] = [
        0xC4, 0xC5, 0xC7, 0xC9, 0xD1, 0xD6, 0xDC, 0xE1, 0xE0, 0xE2, 0xE4, 0xE3, 0xE5, 0xE7, 0xE9, 0xE8, //
        0xEA, 0xEB, 0xED, 0xEC, 0xEE, 0xEF, 0xF1, 0xF3, 0xF2, 0xF4, 0xF6, 0xF5, 0xFA, 0xF9, 0xFB, 0xFC, //
        0x2020, 0xB0, 0xA2, 0xA3, 0xA7, 0x2022, 0xB6, 0xDF, 0xAE, 0xA9, 0x2122, 0xB4, 0xA8, 0x2260, 0xC6, 0xD8, //
        0x221E, 0xB1, 0x2264, 0x2265, 0xA5, 0xB5, 0x2202, 0x2211, 0x220F, 0x3C0, 0x222B, 0xAA, 0xBA, 0x3A9, 0xE6, 0xF8,
        0xBF, 0xA1, 0xAC, 0x221A, 0x192, 0x2248, 0x2206, 0xAB, 0xBB, 0x2026, 0xA0, 0xC0, 0xC3, 0xD5, 0x152,
        0x153, //
        0x2013, 0x2014, 0x201C, 0x201D, 0x2018, 0x2019, 0xF7, 0x25CA, 0xFF, 0x178, 0x2044, 0x20AC, 0x2039, 0x203A,
        0xFB01, 0xFB02, //
        0x2021, 0xB7, 0x201A, 0x201E, 0x2030, 0xC2, 0xCA, 0xC1, 0xCB, 0xC8, 0xCD, 0xCE, 0xCF, 0xCC, 0xD3, 0xD4, //
        0xF8FF, 0xD2, 0xDA, 0xDB, 0xD9, 0x131, 0x2C6, 0x2DC, 0xAF, 0x2D8, 0x2D9, 0x2DA, 0xB8, 0x2DD, 0x2DB, 0x2C7,
    ];
    for (i, &u) in HIGH.iter().enumerate() {
        t[0x80 + i] = char::from_u32(u);
    }
    t
}

/// Adobe StandardEncoding; the upper half covers the common punctuation and
/// ligatures only.
pub fn standard() -> CodeTable {
    let mut t = ascii_base();
    t[39] = Some('\u{2019}');
    t[96] = Some('\u{2018}');
    const HIGH: &[(usize, &str)] = &[
        (0xA1, "exclamdown"),
        (0xA2, "cent"),
        (0xA3, "sterling"),
        (0xA4, "fraction"),
        (0xA5, "yen"),
        (0xA6, "florin"),
        (0xA7, "section"),
        (0xA8, "currency"),
        (0xA9, "quotesingle"),
        (0xAA, "quotedblleft"),
        (0xAB, "guillemotleft"),
        (0xAC, "guilsinglleft"),
        (0xAD, "guilsinglright"),
        (0xAE, "fi"),
        (0xAF, "fl"),
        (0xB1, "endash"),
        (0xB2, "dagger"),
        (0xB3, "daggerdbl"),
        (0xB4, "periodcentered"),
        (0xB6, "paragraph"),
        (0xB7, "bullet"),
        (0xB8, "quotesinglbase"),
        (0xB9, "quotedblbase"),
        (0xBA, "quotedblright"),
        (0xBB, "guillemotright"),
        (0xBC, "ellipsis"),
        (0xBD, "perthousand"),
        (0xBF, "questiondown"),
        (0xD0, "emdash"),
        (0xE1, "AE"),
        (0xE3, "ordfeminine"),
        (0xE8, "Lslash"),
        (0xE9, "Oslash"),
        (0xEA, "OE"),
        (0xEB, "ordmasculine"),
        (0xF1, "ae"),
        (0xF5, "dotlessi"),
        (0xF8, "lslash"),
        (0xF9, "oslash"),
        (0xFA, "oe"),
        (0xFB, "germandbls"),
    ];
    for &(code, name) in HIGH {
        t[code] = glyph_to_unicode(name).and_then(|s| s.chars().next());
    }
    t
}

pub fn by_name(name: &[u8]) -> Option<CodeTable> {
    match name {
        b"WinAnsiEncoding" => Some(win_ansi()),
        b"MacRomanEncoding" => Some(mac_roman()),
        b"StandardEncoding" => Some(standard()),
        _ => None,
    }
}

/// Helvetica advance widths for codes 32..=126 (ASCII order), in 1/1000 em.
const HELVETICA: [u16; 95] = [
    278, 278, 355, 556, 556, 889, 667, 191, 333, 333, 389, 584, 278, 333, 278, 278, 556, 556, 556, 556, 556, 556, 556,
    556, 556, 556, 278, 278, 584, 584, 584, 556, 1015, 667, 667, 722, 722, 667, 611, 778, 722, 278, 500, 667, 556, 833,
    722, 778, 667, 778, 722, 667, 611, 722, 667, 944, 667, 667, 611, 278, 278, 278, 469, 556, 333, 556, 556, 500, 556,
    556, 278, 556, 556, 222, 222, 500, 222, 833, 556, 556, 556, 556, 333, 500, 278, 556, 500, 722, 500, 500, 500, 334,
    260, 334, 584,
];

/// Width of `c` in a standard font without a /Widths array.
pub fn standard_width(base_font: &str, c: Option<char>) -> f64 {
    let family = base_font.split('+').next_back().unwrap_or(base_font);
    if family.starts_with("Courier") {
        return 600.0;
    }
    if family.starts_with("Helvetica") || family.starts_with("Arial") {
        if let Some(c) = c.filter(|c| (' '..='~').contains(c)) {
            return HELVETICA[c as usize - 32] as f64;
        }
        return 556.0;
    }
    500.0
}
