//! Generator input rendering and the chapter output grammar.
//!
//! Input layout (the previous-chapters line is omitted when empty):
//!
//! ```text
//! Episode title: <title>
//! Episode description: <description>
//! Previous chapters: <t1> | <t2> | ...
//!
//! 0: <sentence 0>
//! 1: <sentence 1>
//! ```
//!
//! Output grammar: `<index> := <title>` entries joined by `" | "`, or the
//! exact sentinel [`NO_BOUNDARIES`] when the chunk has no chapter start.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::chunking::{count_words, ChunkBudget};
use crate::corpus::Chapter;
use crate::text::normalize_whitespace;

pub const NO_BOUNDARIES: &str = "No chapter boundaries were found.";
pub const TITLE_LABEL: &str = "Episode title:";
pub const DESCRIPTION_LABEL: &str = "Episode description:";
pub const PREVIOUS_LABEL: &str = "Previous chapters:";
pub const ENTRY_SEPARATOR: &str = " | ";

static ENTRY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*([0-9]+)\s*:=\s*(.+?)\s*$").expect("entry regex"));

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaticContext {
    pub title: String,
    pub description: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicContext {
    pub previous_titles: Vec<String>,
}

/// Parsed generator output for one chunk.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ChunkPrediction {
    /// Strictly increasing start indices, all inside the chunk.
    pub entries: Vec<Chapter>,
    /// True only when the output was exactly the sentinel.
    pub is_empty_sentinel: bool,
}

impl ChunkPrediction {
    pub fn sentinel() -> Self {
        Self {
            entries: Vec::new(),
            is_empty_sentinel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedOutput {
    pub prediction: ChunkPrediction,
    pub warnings: Vec<String>,
}

/// Makes a title safe for the output grammar: `|` becomes `/`, `:=`
/// becomes `=`, and line breaks become spaces.
pub fn sanitize_title(title: &str) -> String {
    let mut t = title.replace('|', "/").replace(['\n', '\r'], " ");
    while t.contains(":=") {
        t = t.replace(":=", "=");
    }
    t.trim().to_string()
}

/// Renders the chunk's chapters, or the sentinel when there are none.
pub fn render_target(chapters: &[Chapter]) -> String {
    if chapters.is_empty() {
        return NO_BOUNDARIES.to_string();
    }
    chapters
        .iter()
        .map(|c| format!("{} := {}", c.start_index, sanitize_title(&c.title)))
        .collect::<Vec<_>>()
        .join(ENTRY_SEPARATOR)
}

fn header_words(title_words: usize, desc_words: usize, previous: &[String]) -> usize {
    let label = |l: &str| count_words(l);
    let mut total = label(TITLE_LABEL) + title_words + label(DESCRIPTION_LABEL) + desc_words;
    if !previous.is_empty() {
        let titles: usize = previous.iter().map(|t| count_words(t)).sum();
        // one "|" token between consecutive titles
        total += label(PREVIOUS_LABEL) + titles + previous.len() - 1;
    }
    total
}

/// Renders the context header followed by a blank line and `chunk_text`.
///
/// The header (labels included) is kept within `budget.context_words()` by
/// cutting the description tail first and then dropping the oldest previous
/// titles. The episode title is only cut when it alone exceeds the budget.
pub fn render_input(
    chunk_text: &str,
    static_ctx: &StaticContext,
    dynamic_ctx: &DynamicContext,
    budget: ChunkBudget,
) -> String {
    let limit = budget.context_words();
    let mut title: Vec<&str> = static_ctx.title.split_whitespace().collect();
    let mut desc: Vec<&str> = static_ctx.description.split_whitespace().collect();
    let mut previous: Vec<String> = dynamic_ctx
        .previous_titles
        .iter()
        .map(|t| normalize_whitespace(&sanitize_title(t)))
        .filter(|t| !t.is_empty())
        .collect();

    let over = |title: &[&str], desc: &[&str], previous: &[String]| {
        header_words(title.len(), desc.len(), previous).saturating_sub(limit)
    };
    let excess = over(&title, &desc, &previous);
    desc.truncate(desc.len().saturating_sub(excess));
    let mut dropped = 0;
    while over(&title, &desc, &previous[dropped..]) > 0 && dropped < previous.len() {
        dropped += 1;
    }
    previous.drain(..dropped);
    let excess = over(&title, &desc, &previous);
    title.truncate(title.len().saturating_sub(excess));

    let mut out = format!(
        "{TITLE_LABEL} {}\n{DESCRIPTION_LABEL} {}\n",
        title.join(" "),
        desc.join(" ")
    );
    if !previous.is_empty() {
        out.push_str(PREVIOUS_LABEL);
        out.push(' ');
        out.push_str(&previous.join(ENTRY_SEPARATOR));
        out.push('\n');
    }
    out.push('\n');
    out.push_str(chunk_text);
    out
}

/// The context header of a rendered input (everything before the blank line).
pub fn context_block(rendered: &str) -> &str {
    rendered
        .split_once("\n\n")
        .map_or(rendered, |(head, _)| head)
}

/// Lenient inverse of [`render_target`]. Never fails: anything that does not
/// fit the grammar is dropped and reported as a warning.
pub fn parse_output(text: &str, valid_range: (usize, usize)) -> ParsedOutput {
    let trimmed = text.trim();
    if trimmed == NO_BOUNDARIES {
        return ParsedOutput {
            prediction: ChunkPrediction::sentinel(),
            warnings: Vec::new(),
        };
    }
    let mut warnings = Vec::new();
    if trimmed.is_empty() {
        warnings.push("empty generator output".to_string());
        return ParsedOutput {
            prediction: ChunkPrediction::default(),
            warnings,
        };
    }

    let (lo, hi) = valid_range;
    let mut entries: Vec<Chapter> = Vec::new();
    for fragment in trimmed.split('|') {
        let Some(caps) = ENTRY.captures(fragment) else {
            warnings.push(format!("unparseable fragment {:?}", fragment.trim()));
            continue;
        };
        let title = caps[2].trim();
        let Ok(index) = caps[1].parse::<usize>() else {
            warnings.push(format!("index {} is not representable", &caps[1]));
            continue;
        };
        if title.is_empty() {
            warnings.push(format!("entry {index} has an empty title"));
            continue;
        }
        if index < lo || index > hi {
            warnings.push(format!("index {index} outside chunk range {lo}..={hi}"));
            continue;
        }
        if entries.iter().any(|c| c.start_index == index) {
            warnings.push(format!("duplicate index {index} ignored"));
            continue;
        }
        entries.push(Chapter::new(index, title));
    }
    if entries
        .windows(2)
        .any(|w| w[0].start_index > w[1].start_index)
    {
        warnings.push("entries were out of order and have been sorted".to_string());
        entries.sort_by_key(|c| c.start_index);
    }
    ParsedOutput {
        prediction: ChunkPrediction {
            entries,
            is_empty_sentinel: false,
        },
        warnings,
    }
}
