const DOUBLE_QUOTES: &[char] = &[
    '\u{201C}', '\u{201D}', '\u{201E}', '\u{201F}', '\u{00AB}', '\u{00BB}', '\u{2033}', '\u{FF02}',
];
const SINGLE_QUOTES: &[char] = &[
    '\u{2018}', '\u{2019}', '\u{201A}', '\u{201B}', '\u{2039}', '\u{203A}', '\u{2032}', '\u{00B4}',
    '\u{0060}',
];
const DASHES: &[char] = &[
    '\u{2010}', '\u{2011}', '\u{2012}', '\u{2013}', '\u{2014}', '\u{2015}', '\u{2212}', '\u{FE58}',
    '\u{FE63}', '\u{FF0D}',
];
const LINE_SEPARATORS: &[char] = &['\u{2028}', '\u{2029}', '\u{0085}'];
/// Line-initial markers turned into [`BULLET`] when followed by a space or
/// the end of the line. Dash variants are already `-` at that point.
const BULLET_MARKERS: &[char] = &['\u{2022}', '\u{00B7}', '\u{25AA}', '\u{25E6}', '\u{2023}', '*', '-'];
const BULLET: char = '\u{2022}';

/// Rule-based typography cleanup. Idempotent.
///
/// * CRLF, CR and Unicode line separators become LF
/// * typographic double quotes become `"`, single quotes and apostrophes `'`
/// * dash variants become `-`
/// * per line, whitespace runs collapse to one space and the line is trimmed
/// * a line-initial bullet marker becomes `"• "`
/// * at most one empty line in a row; no leading or trailing line breaks
pub fn standardize_typography(text: &str) -> String {
    let unified: String = text
        .replace("\r\n", "\n")
        .chars()
        .map(|c| match c {
            '\r' => '\n',
            c if LINE_SEPARATORS.contains(&c) => '\n',
            c if DOUBLE_QUOTES.contains(&c) => '"',
            c if SINGLE_QUOTES.contains(&c) => '\'',
            c if DASHES.contains(&c) => '-',
            c => c,
        })
        .collect();

    let lines: Vec<String> = unified.split('\n').map(normalize_line).collect();

    let mut out = String::with_capacity(unified.len());
    let mut pending_blank = false;
    for line in lines {
        if line.is_empty() {
            pending_blank = !out.is_empty();
            continue;
        }
        if !out.is_empty() {
            out.push('\n');
            if pending_blank {
                out.push('\n');
            }
        }
        pending_blank = false;
        out.push_str(&line);
    }
    out
}

fn normalize_line(line: &str) -> String {
    let collapsed = line.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut chars = collapsed.chars();
    match chars.next() {
        Some(c) if BULLET_MARKERS.contains(&c) && matches!(chars.clone().next(), None | Some(' ')) => {
            let rest = chars.as_str().trim_start();
            if rest.is_empty() {
                BULLET.to_string()
            } else {
                format!("{BULLET} {rest}")
            }
        }
        _ => collapsed,
    }
}
