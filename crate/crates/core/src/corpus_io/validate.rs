use std::fmt;

use serde::Serialize;

use super::{split_iob, Corpus, SchemeKind, OUTSIDE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    EmptySentence,
    EmptyToken,
    /// Token text holds whitespace, which would break the column format.
    WhitespaceInToken,
    EmptyTag,
    TagNotInVocabulary,
    OutsideTagMissing,
    /// Non-`O` tag without a `B-`/`I-` prefix in an IOB corpus.
    MalformedIobTag,
    /// `I-X` not preceded by `B-X` or `I-X`.
    DanglingInside,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::EmptySentence => "empty-sentence",
            Rule::EmptyToken => "empty-token",
            Rule::WhitespaceInToken => "whitespace-in-token",
            Rule::EmptyTag => "empty-tag",
            Rule::TagNotInVocabulary => "tag-not-in-vocabulary",
            Rule::OutsideTagMissing => "outside-tag-missing",
            Rule::MalformedIobTag => "malformed-iob-tag",
            Rule::DanglingInside => "dangling-I",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Rule::DanglingInside => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// `None` for corpus-level violations.
    pub sentence: Option<usize>,
    pub token: Option<usize>,
    pub rule: Rule,
    pub detail: String,
}

impl Violation {
    pub fn severity(&self) -> Severity {
        self.rule.severity()
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.sentence, self.token) {
            (Some(s), Some(t)) => write!(f, "sentence {s}, token {t}: ")?,
            (Some(s), None) => write!(f, "sentence {s}: ")?,
            _ => {}
        }
        write!(f, "{} ({})", self.rule, self.detail)
    }
}

/// Checks every corpus invariant and returns the violations found, in
/// document order. Warnings (such as dangling `I-` tags) are included.
pub fn validate_corpus(corpus: &Corpus) -> Vec<Violation> {
    let mut out = Vec::new();
    if !corpus.scheme.vocabulary.contains(OUTSIDE) {
        out.push(Violation {
            sentence: None,
            token: None,
            rule: Rule::OutsideTagMissing,
            detail: "scheme vocabulary lacks `O`".into(),
        });
    }
    let iob = corpus.scheme.kind == SchemeKind::Iob;
    for (si, sentence) in corpus.sentences.iter().enumerate() {
        if sentence.tokens.is_empty() {
            out.push(Violation {
                sentence: Some(si),
                token: None,
                rule: Rule::EmptySentence,
                detail: "sentence has no tokens".into(),
            });
        }
        let mut prev: Option<&str> = None;
        for (ti, token) in sentence.tokens.iter().enumerate() {
            let mut push = |rule: Rule, detail: String| {
                out.push(Violation {
                    sentence: Some(si),
                    token: Some(ti),
                    rule,
                    detail,
                })
            };
            if token.text.is_empty() {
                push(Rule::EmptyToken, "empty token text".into());
            } else if token.text.chars().any(char::is_whitespace) {
                push(Rule::WhitespaceInToken, format!("{:?}", token.text));
            }
            if token.tag.is_empty() {
                push(Rule::EmptyTag, "empty tag".into());
            } else if !corpus.scheme.contains(&token.tag) {
                push(Rule::TagNotInVocabulary, format!("`{}`", token.tag));
            }
            if iob && token.tag != OUTSIDE && !token.tag.is_empty() {
                match split_iob(&token.tag) {
                    None => push(Rule::MalformedIobTag, format!("`{}`", token.tag)),
                    Some(('I', class)) => {
                        let continues = prev
                            .and_then(split_iob)
                            .is_some_and(|(_, prev_class)| prev_class == class);
                        if !continues {
                            push(Rule::DanglingInside, format!("`{}` starts an entity", token.tag));
                        }
                    }
                    Some(_) => {}
                }
            }
            prev = Some(&token.tag);
        }
    }
    out
}
