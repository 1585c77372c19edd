//! Tolerant extraction of paragraph text from web-page markup.
//!
//! The scanner makes a single pass over the input. Text is captured while
//! at least one `<p>` element is open; `<script>` and `<style>` content is
//! always dropped; every other tag is transparent (its text still counts
//! when inside a paragraph). Nested paragraphs contribute their text once.
//! Malformed input never fails — at worst it yields an empty string.

use crate::text::normalize_ws;

/// Concatenated text of all `<p>…</p>` regions, in document order,
/// whitespace-normalized.
pub fn extract_paragraph_text(html: &str) -> String {
    normalize_ws(&extract_paragraphs(html).join(" "))
}

/// Text of each top-level `<p>…</p>` region, in document order. Each entry
/// is whitespace-normalized; empty paragraphs are dropped.
pub fn extract_paragraphs(html: &str) -> Vec<String> {
    let bytes = html.as_bytes();
    let mut paragraphs = Vec::new();
    let mut current = String::new();
    let mut p_depth: usize = 0;
    let mut pos = 0;

    while pos < bytes.len() {
        match bytes[pos] {
            b'<' => {
                let (event, next) = scan_tag(html, pos);
                match event {
                    TagEvent::OpenP => {
                        p_depth += 1;
                    }
                    TagEvent::CloseP => {
                        if p_depth > 0 {
                            p_depth -= 1;
                            if p_depth == 0 {
                                flush(&mut current, &mut paragraphs);
                            }
                        }
                    }
                    TagEvent::RawText(name) => {
                        // Skip everything through the matching close tag.
                        pos = skip_raw_text(html, next, name);
                        continue;
                    }
                    TagEvent::Other | TagEvent::NotATag => {
                        if matches!(event, TagEvent::NotATag) && p_depth > 0 {
                            current.push('<');
                        }
                    }
                }
                pos = next;
            }
            _ => {
                let end = html[pos..]
                    .find('<')
                    .map_or(html.len(), |off| pos + off);
                if p_depth > 0 {
                    decode_entities(&html[pos..end], &mut current);
                }
                pos = end;
            }
        }
    }
    flush(&mut current, &mut paragraphs);
    paragraphs
}

fn flush(current: &mut String, out: &mut Vec<String>) {
    let text = normalize_ws(current);
    current.clear();
    if !text.is_empty() {
        out.push(text);
    }
}

enum TagEvent<'a> {
    OpenP,
    CloseP,
    /// `<script>` or `<style>`: content is not markup and is discarded.
    RawText(&'a str),
    Other,
    /// A stray `<` that does not begin a tag; treated as text.
    NotATag,
}

/// Scan a tag starting at `start` (which points at `<`). Returns the event
/// and the position just past the tag.
fn scan_tag(html: &str, start: usize) -> (TagEvent<'_>, usize) {
    let bytes = html.as_bytes();
    let after_lt = start + 1;
    if after_lt >= bytes.len() {
        return (TagEvent::NotATag, after_lt);
    }

    // Comments: <!-- ... -->
    if html[after_lt..].starts_with("!--") {
        let end = html[after_lt + 3..]
            .find("-->")
            .map_or(html.len(), |off| after_lt + 3 + off + 3);
        return (TagEvent::Other, end);
    }
    // Declarations and processing instructions: <!DOCTYPE ...>, <?xml ...>
    if bytes[after_lt] == b'!' || bytes[after_lt] == b'?' {
        let end = html[after_lt..]
            .find('>')
            .map_or(html.len(), |off| after_lt + off + 1);
        return (TagEvent::Other, end);
    }

    let closing = bytes[after_lt] == b'/';
    let name_start = if closing { after_lt + 1 } else { after_lt };
    let name_end = html[name_start..]
        .find(|c: char| !c.is_ascii_alphanumeric())
        .map_or(html.len(), |off| name_start + off);
    if name_end == name_start {
        // "<" followed by something that cannot start a tag.
        return (TagEvent::NotATag, after_lt);
    }
    let name = &html[name_start..name_end];
    let tag_end = skip_to_tag_end(html, name_end);

    let lower = name.to_ascii_lowercase();
    let event = if lower == "p" {
        if closing {
            TagEvent::CloseP
        } else if bytes[..tag_end].ends_with(b"/>") {
            TagEvent::Other // self-closing paragraph holds no text
        } else {
            TagEvent::OpenP
        }
    } else if !closing && (lower == "script" || lower == "style") {
        return (TagEvent::RawText(name), tag_end);
    } else {
        TagEvent::Other
    };
    (event, tag_end)
}

/// Position just past the closing `>` of a tag, honoring quoted attribute
/// values so `<p title="a>b">` parses as one tag.
fn skip_to_tag_end(html: &str, from: usize) -> usize {
    let bytes = html.as_bytes();
    let mut pos = from;
    let mut quote: Option<u8> = None;
    while pos < bytes.len() {
        let b = bytes[pos];
        match quote {
            Some(q) if b == q => quote = None,
            Some(_) => {}
            None if b == b'"' || b == b'\'' => quote = Some(b),
            None if b == b'>' => return pos + 1,
            None => {}
        }
        pos += 1;
    }
    pos
}

/// Skip past `</name>` (ASCII case-insensitive), or to end of input when
/// the element is never closed.
fn skip_raw_text(html: &str, from: usize, name: &str) -> usize {
    let lower = html[from..].to_ascii_lowercase();
    let needle = format!("</{}", name.to_ascii_lowercase());
    let mut search = 0;
    while let Some(off) = lower[search..].find(&needle) {
        let at = search + off;
        let after = at + needle.len();
        let next = lower.as_bytes().get(after).copied();
        if matches!(next, None | Some(b'>') | Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r') | Some(b'/')) {
            return lower[after..]
                .find('>')
                .map_or(html.len(), |o| from + after + o + 1);
        }
        search = at + 1;
    }
    html.len()
}

/// Decode the common character references; everything else passes through.
fn decode_entities(chunk: &str, out: &mut String) {
    let mut rest = chunk;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        // Entity names are short ASCII; cap the search so stray ampersands
        // in long text stay cheap. Byte search keeps UTF-8 boundaries safe.
        let window = &rest.as_bytes()[..rest.len().min(12)];
        let semi = match window.iter().position(|&b| b == b';') {
            Some(s) => s,
            None => {
                out.push('&');
                rest = &rest[1..];
                continue;
            }
        };
        let entity = &rest[1..semi];
        let decoded = match entity {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            "nbsp" => Some(' '),
            _ => decode_numeric(entity),
        };
        match decoded {
            Some(c) => {
                out.push(c);
                rest = &rest[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
}

fn decode_numeric(entity: &str) -> Option<char> {
    let digits = entity.strip_prefix('#')?;
    let code = if let Some(hex) = digits.strip_prefix('x').or_else(|| digits.strip_prefix('X')) {
        u32::from_str_radix(hex, 16).ok()?
    } else {
        digits.parse().ok()?
    };
    char::from_u32(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paragraphs_in_document_order() {
        assert_eq!(
            extract_paragraph_text("<p>Hello world</p><div>nav</div><p>again</p>"),
            "Hello world again"
        );
    }

    #[test]
    fn script_content_excluded() {
        assert_eq!(extract_paragraph_text("<script>x</script>"), "");
        assert_eq!(
            extract_paragraph_text("<p>a<script>var x = '<p>no</p>';</script>b</p>"),
            "ab"
        );
        assert_eq!(extract_paragraph_text("<p><style>p {}</style>text</p>"), "text");
    }

    #[test]
    fn inline_markup_is_transparent() {
        assert_eq!(
            extract_paragraph_text("<p>a <b>bold</b> move</p>"),
            "a bold move"
        );
    }

    #[test]
    fn text_outside_paragraphs_excluded() {
        assert_eq!(extract_paragraph_text("free text <span>more</span>"), "");
        assert_eq!(extract_paragraph_text(""), "");
    }

    #[test]
    fn attributes_and_quoted_gt() {
        assert_eq!(
            extract_paragraph_text(r#"<p class="lead" title="a>b">x</p>"#),
            "x"
        );
    }

    #[test]
    fn entities_decoded() {
        assert_eq!(
            extract_paragraph_text("<p>salt &amp; pepper &lt;3 &#65;&#x42;</p>"),
            "salt & pepper <3 AB"
        );
        assert_eq!(extract_paragraph_text("<p>&bogus; &amp</p>"), "&bogus; &amp");
    }

    #[test]
    fn malformed_degrades_to_empty_or_partial() {
        assert_eq!(extract_paragraph_text("<p>never closed"), "never closed");
        assert_eq!(extract_paragraph_text("</p></p>only closers"), "");
        assert_eq!(extract_paragraph_text("<"), "");
        assert_eq!(extract_paragraph_text("<p>a < b</p>"), "a < b");
    }

    #[test]
    fn nested_paragraphs_counted_once() {
        assert_eq!(
            extract_paragraph_text("<p>out <p>in</p> back</p>"),
            "out in back"
        );
    }

    #[test]
    fn comments_and_doctype_skipped() {
        assert_eq!(
            extract_paragraph_text("<!DOCTYPE html><p>a<!-- <p>no</p> -->b</p>"),
            "ab"
        );
    }

    #[test]
    fn paragraph_list_boundaries() {
        assert_eq!(
            extract_paragraphs("<p> one </p><p></p><p>two <i>three</i></p>"),
            vec!["one".to_string(), "two three".to_string()]
        );
    }

    #[test]
    fn unclosed_script_swallows_rest() {
        assert_eq!(extract_paragraph_text("<p>a</p><script>x<p>b</p>"), "a");
    }
}
