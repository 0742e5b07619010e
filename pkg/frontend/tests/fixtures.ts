/** Canned protocol documents for the render tests, shaped exactly like the
 * service responses documented in docs/protocol.md. */

import {
  DispositionDoc,
  NextStep,
  QueryResult,
  StateDoc,
  TraceDoc,
} from "../src/api.js";

export const STATE: StateDoc = {
  id: "0f2c9b1de5a84c19b7f302a6c4d8e901",
  kb: "chest-pain",
  status: "recommending",
  observations: { "substernal-pain": "present" },
  beliefs: {
    "substernal-pain": "confirmed",
    age: "unknown",
    postprandial: "supported",
    angina: "detracted",
    "esophageal-spasm": "supported",
  },
  nodes: [
    {
      id: "substernal-pain",
      kind: "finding",
      belief: "confirmed",
      observed: true,
      value: "present",
      domain: ["present", "absent"],
    },
    {
      id: "age",
      kind: "finding",
      belief: "unknown",
      observed: false,
      value: null,
      domain: ["under-40", "40-to-60", "over-60"],
    },
    {
      id: "pain-after-eating",
      kind: "finding",
      belief: "unknown",
      observed: false,
      value: null,
      domain: ["true", "false"],
    },
    { id: "postprandial", kind: "cluster", belief: "supported", triggered: true },
    {
      id: "angina",
      kind: "hypothesis",
      belief: "detracted",
      dangerous: true,
      triggered: true,
      critical: false,
    },
    {
      id: "esophageal-spasm",
      kind: "hypothesis",
      belief: "supported",
      dangerous: false,
      triggered: true,
      critical: false,
    },
  ],
  actions: [
    {
      id: "ask-age",
      kind: "question",
      cost: { monetary: "free", risk: "free", discomfort: "free" },
      yields: ["age"],
      preconditions: [],
      repeatable: false,
      performed: false,
    },
    {
      id: "ask-episode",
      kind: "question",
      cost: { monetary: "free", risk: "free", discomfort: "free" },
      yields: ["substernal-pain", "pain-after-eating", "episode-pattern"],
      preconditions: [],
      repeatable: false,
      performed: false,
    },
  ],
  "last-diff": [
    ["substernal-pain", "unknown", "confirmed"],
    ["postprandial", "unknown", "supported"],
    ["angina", "unknown", "detracted"],
  ],
  disposition: null,
  resolved: [],
};

export const RECOMMENDATION: NextStep = {
  kind: "recommendation",
  focus: {
    node: "angina",
    tier: "triggered-dangerous",
    rationale: "belief=detracted triggered=true dangerous=true",
  },
  action: STATE.actions[1],
  score: 2,
  candidates: [
    ["ask-age", 0],
    ["ask-episode", 2],
  ],
  rationale:
    "focus angina (triggered-dangerous); cheapest candidate under cost priority" +
    " (risk, monetary, discomfort); marginal-utility bound 2",
};

export const DISPOSITION: DispositionDoc = {
  kind: "disposition",
  disposition: "confirmed-set",
  resolved: ["angina"],
  rationale: "no useful action remains for focus angina",
};

export const CHANGE_RESULT: QueryResult = {
  class: "change",
  target: "angina",
  direction: "increase",
  plans: [
    {
      assignments: { "ekg-result": "ischemic-changes", "during-episode": "true" },
      "resulting-belief": "confirmed",
      "rank-change": 2,
      actions: ["ekg"],
      cost: { monetary: "low", risk: "free", discomfort: "low" },
    },
  ],
};

export const DISCRIMINATE_RESULT: QueryResult = {
  class: "discriminate",
  first: "angina",
  second: "esophageal-spasm",
  mode: "heuristic",
  discriminators: ["episode-pattern", "pain-after-eating", "postprandial", "substernal-pain"],
};

export const TRACE: TraceDoc = {
  id: STATE.id,
  kb: "chest-pain",
  status: "recommending",
  presenting: { "substernal-pain": "present" },
  entries: [
    {
      cycle: 1,
      focus: {
        node: "angina",
        tier: "triggered-dangerous",
        rationale: "belief=detracted triggered=true dangerous=true",
      },
      candidates: [
        ["ask-age", 0],
        ["ask-episode", 2],
      ],
      action: "ask-episode",
      observed: { "pain-after-eating": "false", "episode-pattern": "exertional" },
      diff: [
        ["pain-after-eating", "unknown", "disconfirmed"],
        ["postprandial", "supported", "disconfirmed"],
        ["angina", "detracted", "supported"],
      ],
    },
  ],
  events: [
    {
      sequence: 1,
      timestamp: "2026-08-14T12:00:00+00:00",
      kind: "created",
      payload: { kb: "chest-pain" },
    },
    {
      sequence: 2,
      timestamp: "2026-08-14T12:00:01+00:00",
      kind: "finding-recorded",
      payload: { finding: "substernal-pain", value: "present" },
    },
  ],
  beliefs: STATE.beliefs,
  disposition: null,
  resolved: [],
  "cycle-limit-hit": false,
};
