#!/usr/bin/env node
// SMT-LIB 2 read-eval-print server over the z3-solver WebAssembly build.
//
// Behaves like `z3 -in`: commands arrive on stdin, any output a command
// produces (check-sat verdicts, get-value bindings, errors) is written to
// stdout as soon as the command has been evaluated.  State is kept in one
// Z3 context for the lifetime of the process, so incremental use
// (additional asserts, push/pop, repeated check-sat) works.

"use strict";

function resolveZ3Module() {
  const candidates = [];
  if (process.env.Z3_WASM_MODULE) candidates.push(process.env.Z3_WASM_MODULE);
  const path = require("path");
  candidates.push(path.join(__dirname, "node_modules", "z3-solver"));
  candidates.push(path.join(process.cwd(), "node_modules", "z3-solver"));
  candidates.push("/usr/lib/node_modules/z3-solver");
  candidates.push("/usr/local/lib/node_modules/z3-solver");
  candidates.push("z3-solver");
  for (const cand of candidates) {
    try {
      return require(cand);
    } catch (err) {
      if (err.code !== "MODULE_NOT_FOUND") throw err;
    }
  }
  process.stderr.write(
    "z3_wasm_server: cannot locate the z3-solver npm package; " +
      "install it (npm install -g z3-solver) or set Z3_WASM_MODULE\n"
  );
  process.exit(2);
}

// Split a buffer into complete top-level s-expressions / bare symbols.
// Returns [commands, remainder].  Handles ; line comments and "" strings.
function splitCommands(buf) {
  const commands = [];
  let depth = 0;
  let start = 0;
  let inString = false;
  let inComment = false;
  let sawToken = false;
  let i = 0;
  for (; i < buf.length; i++) {
    const ch = buf[i];
    if (inComment) {
      if (ch === "\n") {
        inComment = false;
        if (depth === 0) start = i + 1;
      }
      continue;
    }
    if (inString) {
      if (ch === '"') inString = false;
      continue;
    }
    if (ch === ";") {
      if (depth === 0) {
        if (sawToken) {
          commands.push(buf.slice(start, i));
          sawToken = false;
        }
        // Keep the comment in the remainder until its newline arrives, so
        // a chunk boundary inside a comment cannot leak words as commands.
        start = i;
      }
      inComment = true;
      continue;
    }
    if (ch === '"') {
      if (depth === 0 && !sawToken) start = i;
      inString = true;
      sawToken = true;
      continue;
    }
    if (ch === "(") {
      if (depth === 0 && sawToken) {
        // bare symbol directly before a paren
        commands.push(buf.slice(start, i));
        sawToken = false;
      }
      if (depth === 0) start = i;
      depth++;
      continue;
    }
    if (ch === ")") {
      depth--;
      if (depth === 0) {
        commands.push(buf.slice(start, i + 1));
        start = i + 1;
        sawToken = false;
      }
      continue;
    }
    if (depth === 0) {
      if (/\s/.test(ch)) {
        if (sawToken) {
          commands.push(buf.slice(start, i));
          sawToken = false;
        }
        start = i + 1;
      } else {
        if (!sawToken) start = i;
        sawToken = true;
      }
    }
  }
  const complete = depth === 0 && !sawToken && !inComment && !inString;
  return [commands, complete ? "" : buf.slice(start)];
}

async function main() {
  const { init } = resolveZ3Module();
  const { Z3 } = await init();
  const ctx = Z3.mk_context(Z3.mk_config());

  let pending = "";
  let queue = Promise.resolve();

  function evalCommand(cmd) {
    const text = cmd.trim();
    if (text === "") return;
    if (text === "(exit)" || text === "exit") {
      queue = queue.then(() => process.exit(0));
      return;
    }
    queue = queue.then(async () => {
      let out;
      for (let attempt = 0; ; attempt++) {
        try {
          out = await Z3.eval_smtlib2_string(ctx, text);
        } catch (err) {
          out = `(error "${String(err).replace(/"/g, "'")}")\n`;
        }
        // The threaded WASM build sporadically corrupts the command text
        // while copying it into the solver heap (stale view after memory
        // growth).  An erroring command has no effect on solver state, so
        // re-evaluating the identical text is safe and usually succeeds.
        if (attempt < 2 && typeof out === "string" && out.trimStart().startsWith("(error")) {
          process.stderr.write(`z3_wasm_server: retrying after ${out.trim()}\n`);
          continue;
        }
        break;
      }
      if (out && out.length > 0) process.stdout.write(out);
    });
  }

  process.stdin.setEncoding("utf8");
  process.stdin.on("data", (chunk) => {
    pending += chunk;
    const [commands, rest] = splitCommands(pending);
    pending = rest;
    for (const cmd of commands) evalCommand(cmd);
  });
  process.stdin.on("end", () => {
    queue.then(() => process.exit(0));
  });
}

main().catch((err) => {
  process.stderr.write(`z3_wasm_server: ${err}\n`);
  process.exit(2);
});
