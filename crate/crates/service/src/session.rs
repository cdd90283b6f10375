//! One elicitation run, suspended on a worker thread at each query.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::{mpsc, Arc, Mutex, MutexGuard};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use tokio::sync::watch;

use riga_core::trace::QueryRecord;
use riga_core::{
    riga_kcss_run, riga_run, riga_s_run, Answer, CostVector, DmError, DmOracle, Family, Instance,
    ProblemKind, Progress, RigaConfig, RunTrace, Solution,
};

use crate::context::ObjectiveContext;
use crate::error::ApiError;

type Runner =
    fn(&Instance, &RigaConfig, &mut dyn DmOracle) -> riga_core::Result<(Solution, RunTrace)>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Riga,
    RigaKcss,
    RigaS,
}

impl Method {
    pub fn runner(self) -> Runner {
        match self {
            Method::Riga => riga_run,
            Method::RigaKcss => riga_kcss_run,
            Method::RigaS => riga_s_run,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SessionState {
    AwaitingAnswer,
    Computing,
    Finished,
    Failed,
}

/// A seeded instance built by the server.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub problem: ProblemKind,
    pub size: usize,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

/// Body of `POST /sessions`; exactly one of `instance` and `generate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub config: RigaConfig,
    #[serde(default)]
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<Instance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate: Option<GenerateSpec>,
}

impl CreateRequest {
    /// Validates the request and builds its instance.
    pub fn resolve(&self) -> Result<Instance, ApiError> {
        let instance = match (&self.instance, &self.generate) {
            (Some(i), None) => i.clone(),
            (None, Some(g)) => Instance::generate(g.problem, g.size, g.n, g.seed).map_err(|e| {
                ApiError::bad_request("invalid_instance", e.to_string()).with_field("generate")
            })?,
            _ => {
                return Err(ApiError::bad_request(
                    "invalid_instance",
                    "give exactly one of `instance` and `generate`",
                )
                .with_field("instance"))
            }
        };
        self.config
            .validate_for(&instance)
            .map_err(|e| ApiError::from_core(e, "instance"))?;
        Ok(instance)
    }
}

/// What gets written to disk: enough to rebuild the session by replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    pub request: CreateRequest,
    pub answers: Vec<Answer>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProgressView {
    pub generation: usize,
    pub generations: usize,
    pub queries: usize,
    pub mmr: f64,
    pub normalized_mmr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub raw: CostVector,
    pub normalized: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryView {
    /// Index of the query within the session; echo it back when answering.
    pub query_id: usize,
    pub a: Candidate,
    pub b: Candidate,
    pub context: ObjectiveContext,
    pub progress: ProgressView,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected_query: Option<QueryRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<RunTrace>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SessionView {
    pub id: String,
    pub state: SessionState,
    pub method: Method,
    pub family: Family,
    pub problem: ProblemKind,
    pub progress: ProgressView,
    pub answers: Vec<Answer>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pending: Option<QueryView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recommendation: Option<CostVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Recommendation {
    pub solution: Solution,
    pub trace: RunTrace,
}

struct Pending {
    id: usize,
    a: CostVector,
    b: CostVector,
}

struct Shared {
    state: SessionState,
    pending: Option<Pending>,
    progress: Progress,
    answers: Vec<Answer>,
    outcome: Option<Recommendation>,
    failure: Option<Failure>,
    reply: Option<mpsc::Sender<Answer>>,
}

pub struct Session {
    pub id: String,
    pub request: CreateRequest,
    pub instance: Instance,
    pub context: ObjectiveContext,
    shared: Mutex<Shared>,
    version: watch::Sender<u64>,
    file: Option<PathBuf>,
}

impl Session {
    /// Starts the run; answers already on record are replayed before any
    /// query is published.
    pub fn start(
        id: String,
        request: CreateRequest,
        instance: Instance,
        answers: Vec<Answer>,
        file: Option<PathBuf>,
    ) -> Result<Arc<Session>, ApiError> {
        let (tx, rx) = mpsc::channel();
        let session = Arc::new(Session {
            id,
            context: ObjectiveContext::of(&instance),
            instance,
            shared: Mutex::new(Shared {
                state: SessionState::Computing,
                pending: None,
                progress: Progress {
                    generations: request.config.generations,
                    ..Progress::default()
                },
                answers,
                outcome: None,
                failure: None,
                reply: Some(tx),
            }),
            request,
            version: watch::Sender::new(0),
            file,
        });
        session.persist(&session.lock().answers)?;
        let worker = Arc::clone(&session);
        thread::Builder::new()
            .name(format!("session-{}", session.id))
            .spawn(move || worker.run(rx))
            .map_err(|e| ApiError::internal(format!("cannot start the session worker: {e}")))?;
        Ok(session)
    }

    fn lock(&self) -> MutexGuard<'_, Shared> {
        self.shared.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn notify(&self) {
        self.version.send_modify(|v| *v += 1);
    }

    fn run(self: Arc<Self>, rx: mpsc::Receiver<Answer>) {
        let mut dm = ChannelDm {
            session: &self,
            rx,
            asked: 0,
            progress: Progress::default(),
        };
        let runner = self.request.method.runner();
        let result = catch_unwind(AssertUnwindSafe(|| {
            runner(&self.instance, &self.request.config, &mut dm)
        }));
        let (state, outcome, failure) = conclude(result);
        let mut s = self.lock();
        s.pending = None;
        s.reply = None;
        s.state = state;
        s.outcome = outcome;
        s.failure = failure;
        drop(s);
        self.notify();
    }

    fn persist(&self, answers: &[Answer]) -> Result<(), ApiError> {
        let Some(path) = &self.file else {
            return Ok(());
        };
        let record = SessionRecord {
            id: self.id.clone(),
            request: self.request.clone(),
            answers: answers.to_vec(),
        };
        let body =
            serde_json::to_vec_pretty(&record).map_err(|e| ApiError::internal(e.to_string()))?;
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, body)
            .and_then(|_| std::fs::rename(&tmp, path))
            .map_err(|e| ApiError::internal(format!("cannot persist session {}: {e}", self.id)))
    }

    pub fn state(&self) -> SessionState {
        self.lock().state
    }

    /// Waits until the run leaves `Computing` or `wait` elapses.
    pub async fn settle(&self, wait: Duration) {
        let mut rx = self.version.subscribe();
        let deadline = tokio::time::Instant::now() + wait;
        while self.state() == SessionState::Computing {
            match tokio::time::timeout_at(deadline, rx.changed()).await {
                Ok(Ok(())) => continue,
                _ => return,
            }
        }
    }

    /// Applies an answer to the pending query and resumes the run.
    pub fn submit(&self, choice: Answer, query_id: Option<usize>) -> Result<(), ApiError> {
        let mut s = self.lock();
        if s.state != SessionState::AwaitingAnswer {
            return Err(ApiError::conflict(
                "not_awaiting_answer",
                format!("session is {:?}, not awaiting an answer", s.state),
            ));
        }
        let pending_id = s
            .pending
            .as_ref()
            .map(|p| p.id)
            .expect("a pending query while awaiting an answer");
        if query_id.is_some_and(|q| q != pending_id) {
            return Err(ApiError::conflict(
                "stale_query",
                format!(
                    "query {} is not pending; the pending query is {pending_id}",
                    query_id.unwrap()
                ),
            )
            .with_field("query_id"));
        }
        let mut answers = s.answers.clone();
        answers.push(choice);
        self.persist(&answers)?;
        let sent = s.reply.as_ref().is_some_and(|tx| tx.send(choice).is_ok());
        if !sent {
            return Err(ApiError::internal("the session worker is gone"));
        }
        s.answers = answers;
        s.pending = None;
        s.state = SessionState::Computing;
        drop(s);
        self.notify();
        Ok(())
    }

    pub fn view(&self) -> SessionView {
        let s = self.lock();
        SessionView {
            id: self.id.clone(),
            state: s.state,
            method: self.request.method,
            family: self.request.config.family,
            problem: self.instance.kind(),
            progress: progress_view(&s),
            answers: s.answers.clone(),
            pending: self.query_view(&s),
            recommendation: match s.state {
                SessionState::Finished => s.outcome.as_ref().map(|o| o.solution.cost.clone()),
                _ => None,
            },
            failure: s.failure.clone(),
        }
    }

    pub fn query(&self) -> Option<QueryView> {
        self.query_view(&self.lock())
    }

    fn query_view(&self, s: &Shared) -> Option<QueryView> {
        let p = s.pending.as_ref()?;
        let candidate = |y: &CostVector| Candidate {
            raw: y.clone(),
            normalized: self.context.normalize(y),
        };
        Some(QueryView {
            query_id: p.id,
            a: candidate(&p.a),
            b: candidate(&p.b),
            context: self.context.clone(),
            progress: progress_view(s),
        })
    }

    pub fn recommendation(&self) -> Result<Recommendation, ApiError> {
        let s = self.lock();
        match (&s.state, &s.outcome) {
            (SessionState::Finished, Some(o)) => Ok(o.clone()),
            (state, _) => Err(ApiError::conflict(
                "not_finished",
                format!("session is {state:?}; a recommendation exists only once it is Finished"),
            )),
        }
    }

    pub fn record(&self) -> SessionRecord {
        SessionRecord {
            id: self.id.clone(),
            request: self.request.clone(),
            answers: self.lock().answers.clone(),
        }
    }
}

type RunResult = std::thread::Result<riga_core::Result<(Solution, RunTrace)>>;

/// Terminal state for a finished worker.
fn conclude(result: RunResult) -> (SessionState, Option<Recommendation>, Option<Failure>) {
    let failure = |code: &str, message: String| Failure {
        code: code.into(),
        message,
        rejected_query: None,
        trace: None,
    };
    match result {
        Ok(Ok((solution, trace))) if trace.inconsistent => {
            let report = Failure {
                rejected_query: trace.rejected_query.clone(),
                trace: Some(trace.clone()),
                ..failure(
                    "inconsistent",
                    "the last answer contradicts the earlier ones; no preference model fits them all".into(),
                )
            };
            (
                SessionState::Failed,
                Some(Recommendation { solution, trace }),
                Some(report),
            )
        }
        Ok(Ok((solution, trace))) => (
            SessionState::Finished,
            Some(Recommendation { solution, trace }),
            None,
        ),
        Ok(Err(e)) => (
            SessionState::Failed,
            None,
            Some(failure("run_error", e.to_string())),
        ),
        Err(_) => (
            SessionState::Failed,
            None,
            Some(failure("internal", "the session worker panicked".into())),
        ),
    }
}

fn progress_view(s: &Shared) -> ProgressView {
    ProgressView {
        generation: s.progress.generation,
        generations: s.progress.generations,
        queries: s.answers.len(),
        mmr: s.progress.mmr,
        normalized_mmr: s.progress.normalized_mmr,
    }
}

/// Publishes each query to the session and blocks until it is answered.
struct ChannelDm<'a> {
    session: &'a Session,
    rx: mpsc::Receiver<Answer>,
    asked: usize,
    progress: Progress,
}

impl DmOracle for ChannelDm<'_> {
    fn observe(&mut self, progress: &Progress) {
        self.progress = progress.clone();
    }

    fn answer(&mut self, a: &CostVector, b: &CostVector) -> Result<Answer, DmError> {
        let id = self.asked;
        self.asked += 1;
        let mut s = self.session.lock();
        s.progress = self.progress.clone();
        if let Some(&recorded) = s.answers.get(id) {
            return Ok(recorded);
        }
        s.pending = Some(Pending {
            id,
            a: a.clone(),
            b: b.clone(),
        });
        s.state = SessionState::AwaitingAnswer;
        drop(s);
        self.session.notify();
        self.rx.recv().map_err(|_| DmError::Disconnected)
    }
}
