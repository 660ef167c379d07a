use serde::Serialize;

use super::ClassicalMessage;

/// Why the kernel replaced a register with `(ε, environment, ε)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResetReason {
    /// The machine left nothing parseable in the register.
    Absorbed,
    Unparseable,
    /// Claimed sender differs from the machine that ran.
    WrongSender,
    /// The register was addressed to an id not in the network.
    UnknownRecipient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    /// Activation index at which this register content was current.
    pub step: usize,
    pub message: ClassicalMessage,
    pub qubits: usize,
    pub note: Option<ResetReason>,
}

#[derive(Serialize)]
struct Line<'a> {
    step: usize,
    sender: String,
    recipient: String,
    payload_hex: String,
    qubits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a ResetReason>,
}

impl TraceEntry {
    pub fn to_json(&self) -> String {
        let line = Line {
            step: self.step,
            sender: self.message.sender.to_string(),
            recipient: self.message.recipient.to_string(),
            payload_hex: hex::encode(&self.message.payload),
            qubits: self.qubits,
            note: self.note.as_ref(),
        };
        serde_json::to_string(&line).expect("trace line serializes")
    }
}

/// One JSON object per line.
pub fn to_json_lines(trace: &[TraceEntry]) -> String {
    let mut out = String::new();
    for e in trace {
        out.push_str(&e.to_json());
        out.push('\n');
    }
    out
}
