//! Line-delimited JSON transcript files.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use qbc_core::transcript::{Message, Transcript};

use crate::error::{Result, SimError};

pub fn write_transcript<W: Write>(transcript: &Transcript, mut out: W) -> Result<()> {
    for message in &transcript.messages {
        serde_json::to_writer(&mut out, message)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn transcript_bytes(transcript: &Transcript) -> Vec<u8> {
    let mut buf = Vec::new();
    write_transcript(transcript, &mut buf).expect("writing to memory cannot fail");
    buf
}

pub fn read_transcript<R: BufRead>(input: R) -> Result<Transcript> {
    let mut messages = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        messages.push(serde_json::from_str::<Message>(&line)?);
    }
    let transcript = Transcript { messages };
    if !transcript.is_well_ordered() {
        return Err(SimError::Invariant("transcript messages out of order".into()));
    }
    Ok(transcript)
}

/// Writes `session-<index>.jsonl` files into `dir`, creating it if needed.
pub fn dump_transcripts<'a>(
    dir: &Path,
    transcripts: impl IntoIterator<Item = (u64, &'a Transcript)>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (index, transcript) in transcripts {
        let path = dir.join(format!("session-{index:06}.jsonl"));
        fs::write(path, transcript_bytes(transcript))?;
    }
    Ok(())
}
