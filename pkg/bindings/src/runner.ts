import { spawnSync } from 'node:child_process';

/** Primary-toolkit version this wrapper was built against. */
export const PINNED_PRIMARY_VERSION = '0.1.0';

let interpreter: string | undefined;

function candidates(): string[] {
  const env = process.env.FRACTALKIT_PYTHON;
  return env ? [env] : ['python3', 'python'];
}

/**
 * Locate the primary CLI and pin its version.  The result is cached; a
 * version mismatch refuses to load rather than risk silent drift between
 * the wrapper's expectations and the toolkit's outputs.
 */
export function primaryInterpreter(): string {
  if (interpreter) return interpreter;
  for (const cand of candidates()) {
    const probe = spawnSync(cand, ['-m', 'fractalkit', '--version'], { encoding: 'utf8' });
    if (probe.status === 0) {
      const version = probe.stdout.trim();
      if (version !== PINNED_PRIMARY_VERSION) {
        throw new Error(
          `fractalkit version mismatch: wrapper pins ${PINNED_PRIMARY_VERSION}, CLI reports ${version}`,
        );
      }
      interpreter = cand;
      return cand;
    }
  }
  throw new Error(
    'fractalkit CLI not found: install the primary package or point FRACTALKIT_PYTHON at its interpreter',
  );
}

/** Run one CLI subcommand; any non-zero exit surfaces as an Error. */
export function runCli(args: string[]): void {
  const python = primaryInterpreter();
  const proc = spawnSync(python, ['-m', 'fractalkit', ...args], { encoding: 'utf8' });
  if (proc.error) throw proc.error;
  if (proc.status !== 0) {
    const detail = (proc.stderr || proc.stdout || '').trim();
    throw new Error(`fractalkit ${args[0]} failed (exit ${proc.status}): ${detail}`);
  }
}
