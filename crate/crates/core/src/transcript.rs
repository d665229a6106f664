//! The public message log of one session.
//!
//! Messages appear in the fixed order HEADER, ANNOUNCE, OPEN, VERDICT, each
//! tagged with the session id and a sequence number starting at 0. Bob's
//! private pulse log never appears; the header only carries the pulse count
//! and the session length.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::protocol::{Announcement, OpeningRecord, VerificationReport};
use crate::session::ProtocolMode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeaderPayload {
    pub config_hash: String,
    pub seed: u64,
    pub session_index: u64,
    pub protocol_mode: ProtocolMode,
    pub pulse_count: u64,
    pub session_duration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MessageKind {
    Header,
    Announce,
    Open,
    Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "UPPERCASE")]
pub enum MessageBody {
    Header(HeaderPayload),
    Announce(Announcement),
    Open(OpeningRecord),
    Verdict(VerificationReport),
}

impl MessageBody {
    pub fn kind(&self) -> MessageKind {
        match self {
            MessageBody::Header(_) => MessageKind::Header,
            MessageBody::Announce(_) => MessageKind::Announce,
            MessageBody::Open(_) => MessageKind::Open,
            MessageBody::Verdict(_) => MessageKind::Verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub session_id: String,
    pub seq: u64,
    #[serde(flatten)]
    pub body: MessageBody,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Transcript {
    pub messages: Vec<Message>,
}

impl Transcript {
    pub fn new(
        session_id: String,
        header: HeaderPayload,
        announcement: Announcement,
        opening: OpeningRecord,
        report: VerificationReport,
    ) -> Self {
        let bodies = [
            MessageBody::Header(header),
            MessageBody::Announce(announcement),
            MessageBody::Open(opening),
            MessageBody::Verdict(report),
        ];
        let messages = bodies
            .into_iter()
            .enumerate()
            .map(|(seq, body)| Message { session_id: session_id.clone(), seq: seq as u64, body })
            .collect();
        Self { messages }
    }

    /// True if the messages follow HEADER → ANNOUNCE → OPEN → VERDICT with
    /// sequence numbers 0..4 under a single session id.
    pub fn is_well_ordered(&self) -> bool {
        const ORDER: [MessageKind; 4] =
            [MessageKind::Header, MessageKind::Announce, MessageKind::Open, MessageKind::Verdict];
        self.messages.len() == ORDER.len()
            && self.messages.iter().zip(ORDER).enumerate().all(|(i, (m, kind))| {
                m.seq == i as u64 && m.body.kind() == kind && m.session_id == self.messages[0].session_id
            })
    }

    pub fn report(&self) -> Option<&VerificationReport> {
        self.messages.iter().find_map(|m| match &m.body {
            MessageBody::Verdict(r) => Some(r),
            _ => None,
        })
    }
}
