#!/usr/bin/env node
/**
 * Bridge entry point.
 *
 *   embed-bridge                      stdio transport, hash backend, dim 384
 *   embed-bridge --model <name>       load a transformer backend by name
 *   embed-bridge --dim <n>            declared dimension
 *   embed-bridge --tcp <port>         listen on TCP instead of stdio
 *
 * Each session starts with the handshake line {"provider", "dim"}; every
 * request line is answered in order. Malformed lines get an error response
 * and the session keeps running.
 */

import * as net from "net";
import * as readline from "readline";
import { createBackend } from "./backend";
import { BridgeSession } from "./session";

interface Options {
  model: string;
  dim: number;
  tcpPort: number | null;
}

function parseArgs(argv: string[]): Options {
  const options: Options = { model: "hash", dim: 384, tcpPort: null };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--model") {
      options.model = argv[++i] ?? "hash";
    } else if (arg === "--dim") {
      options.dim = Number.parseInt(argv[++i] ?? "384", 10);
    } else if (arg === "--tcp") {
      options.tcpPort = Number.parseInt(argv[++i] ?? "0", 10);
    } else if (arg === "--help" || arg === "-h") {
      process.stdout.write(
        "usage: embed-bridge [--model NAME] [--dim N] [--tcp PORT]\n");
      process.exit(0);
    }
  }
  if (!Number.isFinite(options.dim) || options.dim <= 0) {
    throw new Error(`bad --dim value`);
  }
  return options;
}

async function serveStream(
  input: NodeJS.ReadableStream,
  output: NodeJS.WritableStream,
  options: Options,
): Promise<void> {
  const backend = await createBackend(options.model, options.dim);
  const session = new BridgeSession(backend);
  output.write(session.handshake() + "\n");
  const lines = readline.createInterface({ input, crlfDelay: Infinity });
  // Sequential handling keeps responses in request order.
  let chain: Promise<void> = Promise.resolve();
  lines.on("line", (line) => {
    chain = chain.then(async () => {
      const response = await session.handleLine(line);
      if (response) {
        output.write(response + "\n");
      }
    });
  });
  await new Promise<void>((resolve) => lines.on("close", () => resolve()));
  await chain;
}

async function main(): Promise<void> {
  const options = parseArgs(process.argv.slice(2));
  if (options.tcpPort === null) {
    await serveStream(process.stdin, process.stdout, options);
    return;
  }
  const server = net.createServer((socket) => {
    serveStream(socket, socket, options).catch((err) => {
      socket.destroy();
      process.stderr.write(`session failed: ${String(err)}\n`);
    });
  });
  server.listen(options.tcpPort, "127.0.0.1", () => {
    const address = server.address();
    const port = typeof address === "object" && address ? address.port : options.tcpPort;
    process.stderr.write(`embed-bridge listening on 127.0.0.1:${port}\n`);
  });
}

main().catch((err) => {
  process.stderr.write(`fatal: ${String(err)}\n`);
  process.exit(1);
});
