//! Rendering of the verification prompt templates.
//!
//! The templates are embedded from the golden files under `prompts/` at the
//! repository root, which ship with the crate for audit. Rendering is pure
//! string substitution; the placeholder tokens are replaced in a single pass
//! so substituted values are never re-scanned.

use serde::{Deserialize, Serialize};

use crate::types::{Claim, EvidenceSet, LabelConfig, PromptVariant};

const DEFAULT_TEMPLATE: &str = include_str!("../../../prompts/default.txt");
const NO_REASON_TEMPLATE: &str = include_str!("../../../prompts/no_reason.txt");
const AT_LEAST_ONE_TEMPLATE: &str = include_str!("../../../prompts/at_least_one.txt");
const AT_LEAST_TWO_TEMPLATE: &str = include_str!("../../../prompts/at_least_two.txt");
const INCLUSIVE_TEMPLATE: &str = include_str!("../../../prompts/inclusive.txt");
const FINAL_VERIFICATION_TEMPLATE: &str = include_str!("../../../prompts/final_verification.txt");
const DIVERSITY_ADDENDUM: &str = include_str!("../../../prompts/diversity_addendum.txt");

const KNOWLEDGE_TOKEN: &str = "{_KNOWLEDGE_PLACEHOLDER}";
const STATEMENT_TOKEN: &str = "{_STATEMENT_PLACEHOLDER}";
const FACTUAL_TOKEN: &str = "{_Factual_LABEL}";
const NON_FACTUAL_TOKEN: &str = "{_Non_Factual_LABEL}";

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("{0:?} is not a step prompt variant")]
    UnknownVariant(PromptVariant),
}

/// A fully substituted prompt ready to send as a single user message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub text: String,
    pub variant: PromptVariant,
    pub knowledge_item_count: usize,
}

/// The embedded template for a variant, placeholders intact.
pub fn template_text(variant: PromptVariant) -> &'static str {
    match variant {
        PromptVariant::Default => DEFAULT_TEMPLATE,
        PromptVariant::NoReason => NO_REASON_TEMPLATE,
        PromptVariant::AtLeastOne => AT_LEAST_ONE_TEMPLATE,
        PromptVariant::AtLeastTwo => AT_LEAST_TWO_TEMPLATE,
        PromptVariant::Inclusive => INCLUSIVE_TEMPLATE,
        PromptVariant::FinalVerification => FINAL_VERIFICATION_TEMPLATE,
        PromptVariant::DiversityAddendum => DIVERSITY_ADDENDUM,
    }
}

/// The diversity instruction sentence, without trailing newline.
pub fn diversity_addendum_text() -> &'static str {
    DIVERSITY_ADDENDUM.trim_end_matches('\n')
}

/// Serialize the evidence set into the KNOWLEDGE block.
///
/// Each item becomes a numbered line `"<rank+1>. <snippet>"`; the empty set
/// renders as the literal "N/A" so emptiness stays visible to the model.
pub fn render_knowledge_block(evidence: &EvidenceSet) -> String {
    if evidence.is_empty() {
        return "N/A".to_string();
    }
    evidence
        .items()
        .iter()
        .map(|e| format!("{}. {}", e.rank + 1, e.snippet))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Render one of the five step prompts for a claim and its evidence so far.
///
/// With `diversity` set, the diversity instruction is appended as one more
/// numbered instruction line ahead of the KNOWLEDGE block.
pub fn render_step_prompt(
    variant: PromptVariant,
    claim: &Claim,
    evidence: &EvidenceSet,
    diversity: bool,
    labels: &LabelConfig,
) -> Result<RenderedPrompt, PromptError> {
    if !variant.is_step_variant() {
        return Err(PromptError::UnknownVariant(variant));
    }
    let mut template = template_text(variant).to_string();
    if diversity {
        template = append_instruction(&template, diversity_addendum_text());
    }
    Ok(render(&template, variant, claim, evidence, labels))
}

/// Render the forced final-verification prompt over the accumulated evidence.
pub fn render_final_prompt(
    claim: &Claim,
    evidence: &EvidenceSet,
    labels: &LabelConfig,
) -> RenderedPrompt {
    render(
        template_text(PromptVariant::FinalVerification),
        PromptVariant::FinalVerification,
        claim,
        evidence,
        labels,
    )
}

fn render(
    template: &str,
    variant: PromptVariant,
    claim: &Claim,
    evidence: &EvidenceSet,
    labels: &LabelConfig,
) -> RenderedPrompt {
    let knowledge = render_knowledge_block(evidence);
    let text = substitute(
        template,
        &[
            (KNOWLEDGE_TOKEN, &knowledge),
            (STATEMENT_TOKEN, &claim.text),
            (FACTUAL_TOKEN, &labels.factual),
            (NON_FACTUAL_TOKEN, &labels.non_factual),
        ],
    );
    RenderedPrompt { text, variant, knowledge_item_count: evidence.len() }
}

/// Replace every occurrence of each token in one left-to-right pass.
fn substitute(template: &str, bindings: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    loop {
        let next = bindings
            .iter()
            .filter_map(|(token, value)| rest.find(token).map(|at| (at, *token, *value)))
            .min_by_key(|(at, ..)| *at);
        match next {
            Some((at, token, value)) => {
                out.push_str(&rest[..at]);
                out.push_str(value);
                rest = &rest[at + token.len()..];
            }
            None => {
                out.push_str(rest);
                return out;
            }
        }
    }
}

/// Append `instruction` as the next numbered line after the last instruction,
/// keeping the blank line that precedes the KNOWLEDGE block.
fn append_instruction(template: &str, instruction: &str) -> String {
    let marker = "\n\nKNOWLEDGE:";
    let cut = template.find(marker).unwrap_or(template.len());
    let (head, tail) = template.split_at(cut);
    let next_number = head
        .lines()
        .filter(|line| {
            let digits = line.chars().take_while(char::is_ascii_digit).count();
            digits > 0 && line[digits..].starts_with('.')
        })
        .count()
        + 1;
    format!("{head}\n{next_number}. {instruction}{tail}")
}
