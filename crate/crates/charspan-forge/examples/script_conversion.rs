//! Brahmic script conversion by Unicode block offset.
//!
//! ```bash
//! cargo run -p charspan-forge --example script_conversion
//! ```

use charspan_forge::corpus::Sentence;
use charspan_forge::script::{convert, Script};

fn main() -> anyhow::Result<()> {
    // "kitaab likhna" (to write a book) in Devanagari, mixed with Latin.
    let text = Sentence::new(
        "\u{0915}\u{093F}\u{0924}\u{093E}\u{092C} \u{0932}\u{093F}\u{0916}\u{0928}\u{093E} (book)",
    )?;
    println!("devanagari: {text}");
    for target in [Script::Bengali, Script::Gurmukhi, Script::Gujarati, Script::Oriya] {
        let (converted, report) = convert(&text, Script::Devanagari, target);
        println!(
            "{:<10}  {converted}   (converted {}, passthrough {})",
            target.to_string(),
            report.converted,
            report.passthrough_unassigned + report.out_of_block
        );
    }

    // Round trip.
    let (bengali, _) = convert(&text, Script::Devanagari, Script::Bengali);
    let (back, _) = convert(&bengali, Script::Bengali, Script::Devanagari);
    assert_eq!(back, text);
    println!("round trip restores the original");
    Ok(())
}
