import init, { Simulation } from "./pkg/votesim_web.js";

const palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"];
const abstainColor = "#c8c8c8";

const canvas = document.getElementById("plane");
const ctx = canvas.getContext("2d");
const form = document.getElementById("params");
const playButton = document.getElementById("play");
const errorBox = document.getElementById("error");

let sim = null;
let running = false;

function readParams() {
  const data = new FormData(form);
  const params = {};
  for (const [key, value] of data) {
    params[key] = ["num_voters", "num_candidates", "seed"].includes(key) ? parseInt(value, 10) : parseFloat(value);
  }
  return params;
}

function restart() {
  try {
    sim = new Simulation(JSON.stringify({ params: readParams() }));
    errorBox.textContent = "";
  } catch (e) {
    errorBox.textContent = e.message ?? String(e);
    return;
  }
  const target = document.getElementById("target");
  target.replaceChildren();
  for (const c of JSON.parse(sim.tally_json()).candidates) {
    target.append(new Option(c.label, c.id));
  }
  draw();
}

function draw() {
  const view = JSON.parse(sim.tally_json());
  const xy = sim.positions();
  const ballots = sim.ballots();
  const w = canvas.width, h = canvas.height;
  ctx.clearRect(0, 0, w, h);

  for (let i = 0; i < ballots.length; i++) {
    ctx.fillStyle = ballots[i] < 0 ? abstainColor : palette[ballots[i] % palette.length];
    ctx.fillRect(xy[2 * i] * w - 1.5, (1 - xy[2 * i + 1]) * h - 1.5, 3, 3);
  }
  view.candidates.forEach((c, i) => {
    const x = c.x * w, y = (1 - c.y) * h;
    ctx.beginPath();
    ctx.arc(x, y, 9, 0, 2 * Math.PI);
    ctx.fillStyle = palette[i % palette.length];
    ctx.fill();
    ctx.lineWidth = 2 + 6 * c.repulsion;
    ctx.strokeStyle = `rgba(0,0,0,${0.3 + 0.7 * c.repulsion})`;
    ctx.stroke();
    ctx.fillStyle = "#000";
    ctx.fillText(c.label, x + 12, y + 4);
  });

  document.getElementById("time").textContent = view.time;
  const rows = view.candidates.map((c, i) => {
    const tr = document.createElement("tr");
    tr.innerHTML = `<td><span class="swatch" style="background:${palette[i % palette.length]}"></span>${c.label}</td>` +
      `<td>${c.repulsion.toFixed(3)}</td><td>${c.votes}</td><td>${(100 * c.share).toFixed(1)}%</td>`;
    return tr;
  });
  const abstain = document.createElement("tr");
  abstain.innerHTML = `<td><span class="swatch" style="background:${abstainColor}"></span>Abstention</td>` +
    `<td></td><td>${view.abstentions}</td><td>${(100 * view.abstention_rate).toFixed(1)}%</td>`;
  document.querySelector("#tally tbody").replaceChildren(...rows, abstain);
}

function frame() {
  if (!running) return;
  sim.step(parseInt(document.getElementById("speed").value, 10));
  draw();
  requestAnimationFrame(frame);
}

form.addEventListener("submit", (e) => {
  e.preventDefault();
  running = false;
  playButton.textContent = "Play";
  restart();
});

playButton.addEventListener("click", () => {
  running = !running;
  playButton.textContent = running ? "Pause" : "Play";
  if (running) requestAnimationFrame(frame);
});

document.getElementById("once").addEventListener("click", () => {
  sim.step(1);
  draw();
});

document.getElementById("trigger").addEventListener("click", () => {
  const target = parseInt(document.getElementById("target").value, 10);
  const intensity = parseFloat(document.getElementById("intensity").value);
  try {
    sim.trigger_scandal(target, intensity);
    errorBox.textContent = "";
  } catch (e) {
    errorBox.textContent = e.message ?? String(e);
  }
  draw();
});

await init();
restart();
