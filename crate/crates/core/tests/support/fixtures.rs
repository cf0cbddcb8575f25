//! Deterministic fixture corpora.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simplikit::corpus::{CorpusRecord, Split};

const SUBJECTS: [&str; 8] = [
    "Der Arzt", "Die Stadt", "Das Amt", "Die Schule", "Der Verein", "Die Bank", "Das Kind",
    "Die Polizei",
];
const VERBS: [&str; 8] = ["hilft", "zahlt", "prüft", "sucht", "plant", "baut", "öffnet", "liest"];
const OBJECTS: [&str; 8] = [
    "den Antrag", "die Miete", "das Geld", "die Post", "den Brief", "die Karte", "das Formular",
    "die Wohnung",
];
const TAILS: [&str; 8] = [
    "am Montag", "in der Stadt", "für alle", "sehr genau", "im Sommer", "ohne Kosten", "mit Hilfe",
    "jeden Tag",
];
const FILLERS: [&str; 8] = [
    "nämlich", "bekanntlich", "gewissermaßen", "ausdrücklich", "grundsätzlich", "durchaus",
    "offenkundig", "regelmäßig",
];
const SYNONYMS: [(&str, &str); 8] = [
    ("hilft", "unterstützt"),
    ("zahlt", "bezahlt"),
    ("prüft", "kontrolliert"),
    ("sucht", "braucht"),
    ("Antrag", "Brief"),
    ("Geld", "Einkommen"),
    ("Miete", "Rechnung"),
    ("genau", "gründlich"),
];

/// One fixture document triple: complex source, model output, reference.
pub struct Triple {
    pub source: String,
    pub prediction: String,
    pub reference: String,
}

fn sentence(rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    let mut words = Vec::new();
    for part in [
        SUBJECTS.choose(rng).unwrap(),
        VERBS.choose(rng).unwrap(),
        OBJECTS.choose(rng).unwrap(),
        TAILS.choose(rng).unwrap(),
    ] {
        words.extend(part.split(' '));
    }
    words
}

/// Reference: short plain sentences, one per line. Source: the same
/// sentences with filler words after every second word, chained by "und"
/// into one long sentence. Prediction: the reference with some synonyms,
/// each sentence broken into two bullet lines after the verb.
pub fn simplification_corpus(n: usize, seed: u64) -> Vec<Triple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let k = rng.gen_range(3..=6);
            let sentences: Vec<Vec<&str>> = (0..k).map(|_| sentence(&mut rng)).collect();
            let reference = sentences
                .iter()
                .map(|s| format!("{}.", s.join(" ")))
                .collect::<Vec<_>>()
                .join("\n");
            let source = sentences
                .iter()
                .map(|s| {
                    let mut out = Vec::new();
                    for (i, w) in s.iter().enumerate() {
                        out.push(*w);
                        if i % 2 == 1 {
                            out.push(FILLERS.choose(&mut rng).unwrap());
                        }
                    }
                    out.join(" ")
                })
                .collect::<Vec<_>>()
                .join(" und ")
                + ".";
            let prediction = sentences
                .iter()
                .map(|s| {
                    let words: Vec<&str> = s
                        .iter()
                        .map(|w| match SYNONYMS.iter().find(|(a, _)| a == w) {
                            Some((_, b)) if rng.gen_bool(0.7) => *b,
                            _ => *w,
                        })
                        .collect();
                    let (head, tail) = words.split_at(3);
                    format!("- {}.\n- {}.", head.join(" "), tail.join(" "))
                })
                .collect::<Vec<_>>()
                .join("\n");
            Triple {
                source,
                prediction,
                reference,
            }
        })
        .collect()
}

/// Paired simple and complex renderings of the same content. The simple
/// side has one short comma-free sentence per line and no split verbs; the
/// complex side packs long comma-laden sentences with separated particles
/// into one line.
pub fn complexity_pair(rng: &mut ChaCha8Rng) -> (String, String) {
    let k = rng.gen_range(2..=5);
    let mut simple = Vec::new();
    let mut complex = Vec::new();
    for _ in 0..k {
        let subject = SUBJECTS.choose(rng).unwrap();
        let object = OBJECTS.choose(rng).unwrap();
        let tail = TAILS.choose(rng).unwrap();
        let filler = FILLERS.choose(rng).unwrap();
        simple.push(format!("{subject} sieht {object}."));
        complex.push(format!(
            "{subject} ruft {object} {tail} {filler} an, weil {} {object} {tail} prüft, und {} kommt später zurück.",
            SUBJECTS.choose(rng).unwrap().to_lowercase(),
            SUBJECTS.choose(rng).unwrap().to_lowercase(),
        ));
    }
    (simple.join("\n"), complex.join(" "))
}

/// Records from three provenances across both splits.
pub fn stats_corpus() -> Vec<CorpusRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let provenances = ["hurraki", "lebenshilfe", "ndr"];
    (0..30)
        .map(|i| {
            let s = sentence(&mut rng).join(" ");
            CorpusRecord {
                id: format!("doc-{i:02}"),
                source: format!("{s}, {}.", FILLERS[i % 8]),
                target: format!("{s}."),
                provenance: provenances[i % 3].to_string(),
                split: if i % 4 == 0 { Split::Test } else { Split::Train },
                template_id: None,
            }
        })
        .collect()
}

/// Random text over a pool of words, for metric properties.
pub fn random_text(rng: &mut ChaCha8Rng, pool: &[&str], max_len: usize) -> String {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| *pool.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}
