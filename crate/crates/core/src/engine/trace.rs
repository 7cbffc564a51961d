use std::fmt;

use super::SimTime;

/// One line of the event trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub time: SimTime,
    pub entity_id: u64,
    pub entity_class: &'static str,
    pub event_kind: &'static str,
    pub detail: Option<String>,
}

impl TraceRecord {
    pub fn new(
        time: SimTime,
        entity_id: u64,
        entity_class: &'static str,
        event_kind: &'static str,
    ) -> Self {
        TraceRecord {
            time,
            entity_id,
            entity_class,
            event_kind,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={:.2} id={} class={} event={}",
            self.time.value(),
            self.entity_id,
            self.entity_class,
            self.event_kind
        )?;
        if let Some(d) = &self.detail {
            write!(f, " detail={d}")?;
        }
        Ok(())
    }
}

/// Collects trace lines when verbose, otherwise only counts records.
///
/// Turning tracing off must never change results, so models emit through the
/// tracer unconditionally and let it decide whether to format.
#[derive(Debug, Default, Clone)]
pub struct Tracer {
    verbose: bool,
    lines: Vec<String>,
    emitted: u64,
}

impl Tracer {
    pub fn new(verbose: bool) -> Self {
        Tracer {
            verbose,
            lines: Vec::new(),
            emitted: 0,
        }
    }

    pub fn is_verbose(&self) -> bool {
        self.verbose
    }

    /// Records an event. Returns the formatted line when verbose.
    pub fn emit(&mut self, record: TraceRecord) -> Option<&str> {
        self.emitted += 1;
        if !self.verbose {
            return None;
        }
        self.lines.push(record.to_string());
        self.lines.last().map(String::as_str)
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn into_lines(self) -> Vec<String> {
        self.lines
    }

    /// Newline-terminated trace text.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verbose_line_format() {
        let mut tr = Tracer::new(true);
        let rec = TraceRecord::new(SimTime::new(12.4).unwrap(), 3, "AandE", "arrival");
        assert_eq!(tr.emit(rec), Some("t=12.40 id=3 class=AandE event=arrival"));
    }

    #[test]
    fn detail_is_appended() {
        let rec = TraceRecord::new(SimTime::new(1.0).unwrap(), 0, "Elective", "cancelled operation")
            .with_detail("beds=24/24");
        assert_eq!(
            rec.to_string(),
            "t=1.00 id=0 class=Elective event=cancelled operation detail=beds=24/24"
        );
    }

    #[test]
    fn quiet_tracer_writes_nothing_but_counts() {
        let mut tr = Tracer::new(false);
        assert!(tr.emit(TraceRecord::new(SimTime::ZERO, 0, "x", "y")).is_none());
        assert_eq!(tr.emitted(), 1);
        assert!(tr.lines().is_empty());
    }

    #[test]
    fn no_events_empty_trace() {
        let tr = Tracer::new(true);
        assert_eq!(tr.to_text(), "");
    }
}
